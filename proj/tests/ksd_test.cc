// Copyright 2026 The kuht Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kuht/error.h"
#include "kuht/ksd.h"
#include "test_util.h"

namespace kuht {
namespace {

using testing::mean_se;
using testing::normal_sample;

// Assembles h_p from finite differences of k and the model score.
double fd_stein(const TargetModel& P, const KernelSpec& k, double x,
                double y) {
  const double h = 1e-4;
  auto kk = [&](double a, double b) {
    Eigen::VectorXd u(1), v(1);
    u << a;
    v << b;
    return eval_kernel(k, u, v);
  };
  Eigen::VectorXd u(1), v(1);
  u << x;
  v << y;
  const double sx = score(P, u)[0], sy = score(P, v)[0];
  const double dkx = (kk(x + h, y) - kk(x - h, y)) / (2 * h);
  const double dky = (kk(x, y + h) - kk(x, y - h)) / (2 * h);
  const double dxy = (kk(x + h, y + h) - kk(x + h, y - h) - kk(x - h, y + h) +
                      kk(x - h, y - h)) /
                     (4 * h * h);
  return sx * sy * kk(x, y) + sy * dkx + sx * dky + dxy;
}

Eigen::VectorXd pt(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

TEST(SteinKernel, PinnedValues) {
  const SteinContext ctx(TargetModel::gaussian_1d(0, 1),
                         KernelSpec::gaussian(1.0));
  EXPECT_NEAR(stein_kernel(ctx, pt(0), pt(0)), 1.0, 1e-15);
  EXPECT_NEAR(stein_kernel(ctx, pt(1), pt(1)), 2.0, 1e-15);
  const SteinContext ctx3(
      TargetModel::gaussian(Eigen::VectorXd::Zero(3), 1.0),
      KernelSpec::gaussian(2.0));
  EXPECT_NEAR(stein_kernel(ctx3, Eigen::VectorXd::Zero(3),
                           Eigen::VectorXd::Zero(3)),
              1.5, 1e-15);
}

TEST(SteinKernel, FiniteDifferenceAssembly) {
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(-3, 3);
  const std::vector<TargetModel> models = {
      TargetModel::gaussian_1d(0.4, 1.7),
      TargetModel::mixture_1d({0.25, 0.75}, {-1.0, 1.5}, 0.8)};
  const std::vector<KernelSpec> kernels = {KernelSpec::gaussian(0.7),
                                           KernelSpec::imq(1.2, -0.5)};
  for (const auto& P : models) {
    for (const auto& k : kernels) {
      const SteinContext ctx(P, k);
      for (int t = 0; t < 50; ++t) {
        const double x = u(g), y = u(g);
        EXPECT_NEAR(stein_kernel(ctx, pt(x), pt(y)), fd_stein(P, k, x, y),
                    1e-5)
            << k.to_string() << " " << x << " " << y;
      }
    }
  }
}

TEST(SteinKernel, Symmetry) {
  std::mt19937_64 g(42);
  const SteinContext ctx(
      TargetModel::gaussian(Eigen::Vector2d(0.5, -0.2), 1.5),
      KernelSpec::imq(1.0, -0.5));
  for (int t = 0; t < 500; ++t) {
    const Eigen::VectorXd x = testing::normal_point(g, 2, 1.5);
    const Eigen::VectorXd y = testing::normal_point(g, 2, 1.5);
    EXPECT_EQ(stein_kernel(ctx, x, y), stein_kernel(ctx, y, x));
  }
}

TEST(SteinKernel, UnsupportedInputs) {
  const auto F = TargetModel::finite(FiniteDist({0.5, 0.5}));
  EXPECT_THROW(SteinContext(F, KernelSpec::gaussian(1.0)), Unsupported);
  EXPECT_THROW(
      SteinContext(TargetModel::gaussian_1d(0, 1), KernelSpec::delta(3)),
      Unsupported);
}

TEST(SteinKernel, LogOffsetBitIdentical) {
  std::mt19937_64 g(43);
  const auto P = TargetModel::mixture_1d({0.5, 0.5}, {-2.0, 2.0}, 1.0);
  const SteinContext a(P, KernelSpec::gaussian(1.0));
  const SteinContext b(P.with_log_offset(123.456), KernelSpec::gaussian(1.0));
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd x = testing::normal_point(g, 1, 3.0);
    const Eigen::VectorXd y = testing::normal_point(g, 1, 3.0);
    EXPECT_EQ(stein_kernel(a, x, y), stein_kernel(b, x, y));
  }
}

TEST(KsdStatistics, SmallCases) {
  const SteinContext ctx(TargetModel::gaussian_1d(0, 1),
                         KernelSpec::gaussian(1.0));
  EXPECT_NEAR(ksd2_vstat(ctx, Sample::from_values({0.0})), 1.0, 1e-15);
  const auto two = Sample::from_values({0.3, -1.1});
  EXPECT_NEAR(ksd2_ustat(ctx, two), stein_kernel(ctx, pt(0.3), pt(-1.1)),
              1e-15);
  EXPECT_THROW(ksd2_ustat(ctx, Sample::from_values({0.0})), InvalidInput);
}

TEST(KsdStatistics, VstatNonnegativeAndDiagonalGap) {
  std::mt19937_64 g(44);
  std::uniform_real_distribution<double> u(0.3, 2.5);
  for (int t = 0; t < 500; ++t) {
    const auto k = t % 2 ? KernelSpec::gaussian(u(g)) : KernelSpec::imq(u(g), -0.5);
    const SteinContext ctx(TargetModel::gaussian_1d(0.0, u(g)), k);
    const Eigen::Index n = 2 + t % 20;
    const Sample X = normal_sample(g, n, 1, u(g), u(g) - 1.2);
    const Eigen::MatrixXd H = stein_matrix(ctx, X);
    const double v = ksd2_vstat(ctx, X), w = ksd2_ustat(ctx, X);
    EXPECT_GE(v, 0.0);
    EXPECT_NEAR(v, ksd2_vstat(H), 1e-12 * std::max(1.0, std::abs(v)));
    EXPECT_NEAR(w, ksd2_ustat(H), 1e-12 * std::max(1.0, std::abs(w)));
    // v - u = (mean diagonal - u) / n, and off-diagonal entries of a PSD
    // matrix are bounded by the largest diagonal entry, so the gap is at
    // most 2 max_i h(x_i, x_i) / n.
    const double hmax = H.diagonal().maxCoeff();
    EXPECT_NEAR(v - w, (H.diagonal().mean() - w) / n,
                1e-12 * std::max(1.0, hmax));
    EXPECT_LE(std::abs(w - v), 2 * hmax / n * (1 + 1e-12)) << t;
    // Brute-force V and U from the matrix entries.
    double all = 0.0, off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        all += H(i, j);
        if (i != j) off += H(i, j);
      }
    }
    EXPECT_NEAR(v, all / double(n * n), 1e-10);
    EXPECT_NEAR(w, off / double(n * (n - 1)), 1e-10);
  }
}

TEST(KsdStatistics, NullBehaviourAtLargeN) {
  const auto P = TargetModel::gaussian_1d(0, 1);
  const SteinContext ctx(P, KernelSpec::gaussian(1.0));
  std::vector<double> v, u;
  for (int t = 0; t < 200; ++t) {
    RngStream r(45, t);
    const Sample X = sample(P, 2000, r);
    const Eigen::MatrixXd H = stein_matrix(ctx, X);
    if (t < 50) v.push_back(ksd2_vstat(H));
    u.push_back(ksd2_ustat(H));
  }
  EXPECT_LE(mean_se(v).mean, 0.01);
  const auto ms = mean_se(u);
  EXPECT_LT(std::abs(ms.mean), 3 * ms.se);
}

TEST(SteinMean, IdentityHolds) {
  const SteinContext ctx(TargetModel::gaussian_1d(0, 1),
                         KernelSpec::gaussian(1.0));
  EXPECT_NEAR(stein_mean_check(ctx, 0.0), 0.0, 1e-5);
  EXPECT_NEAR(stein_mean_check(ctx, 3.7), 0.0, 1e-5);
  const std::vector<TargetModel> models = {
      TargetModel::gaussian_1d(1.5, 0.5),
      TargetModel::mixture_1d({0.3, 0.7}, {-2.0, 1.0}, 0.7)};
  for (const auto& P : models) {
    for (const auto& k :
         {KernelSpec::gaussian(0.6), KernelSpec::imq(1.0, -0.5)}) {
      const SteinContext c(P, k);
      for (double y : {-3.0, -0.4, 0.0, 1.1, 4.2}) {
        EXPECT_NEAR(stein_mean_check(c, y), 0.0, 1e-5) << k.to_string();
      }
    }
  }
}

TEST(SteinMean, DetectsMismatchedScore) {
  const SteinContext ctx(TargetModel::gaussian_1d(1, 1),
                         KernelSpec::gaussian(1.0));
  const auto against = TargetModel::gaussian_1d(0, 1);
  EXPECT_GT(std::abs(stein_mean_check(ctx, 0.0, &against)), 1e-3);
  EXPECT_GT(std::abs(stein_mean_check(ctx, 3.7, &against)), 1e-3);
}

TEST(KsdWarnings, ConditionTags) {
  EXPECT_EQ(weak_convergence_condition(KernelSpec::gaussian(1.0), 1), 1);
  EXPECT_FALSE(weak_convergence_condition(KernelSpec::gaussian(1.0), 2));
  EXPECT_EQ(weak_convergence_condition(KernelSpec::imq(1.0, -0.5), 5), 3);
  const SteinContext g1(TargetModel::gaussian_1d(0, 1),
                        KernelSpec::gaussian(1.0));
  EXPECT_TRUE(ksd_warnings(g1, 1).empty());
  EXPECT_EQ(ksd_warnings(g1, 2).size(), 1u);
  const SteinContext lap(TargetModel::laplace(0, 1), KernelSpec::imq(1.0, -0.5));
  const auto w = ksd_warnings(lap, 1);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("experimental"), std::string::npos);
}

}  // namespace
}  // namespace kuht
