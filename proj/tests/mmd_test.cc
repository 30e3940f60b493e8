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
#include "kuht/mmd.h"
#include "test_util.h"

namespace kuht {
namespace {

using testing::mean_se;
using testing::normal_sample;

// Brute-force V- and U-statistics from explicit Gram matrices.
double brute_two(const KernelSpec& k, const Sample& Y, const Sample& X,
                 bool unbiased) {
  const auto GY = gram(k, Y, Y), GX = gram(k, X, X), GXY = gram(k, Y, X);
  const double m = Y.n(), n = X.n();
  if (!unbiased) {
    return GY.sum() / (m * m) + GX.sum() / (n * n) - 2 * GXY.sum() / (m * n);
  }
  return (GY.sum() - GY.trace()) / (m * (m - 1)) +
         (GX.sum() - GX.trace()) / (n * (n - 1)) - 2 * GXY.sum() / (m * n);
}

TEST(MmdModel, PinnedValues) {
  const auto k = KernelSpec::gaussian(1.0);
  const auto X = Sample::from_values({0.0});
  const auto v = mmd2_biased_model(TargetModel::gaussian_1d(0, 1), k, X);
  EXPECT_NEAR(v.value, 1 + std::sqrt(1.0 / 3.0) - 2 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(v.value, 0.163136, 1e-6);
  EXPECT_EQ(v.kind, MmdKind::kBiased);
  EXPECT_EQ(v.n, 1);
  EXPECT_FALSE(v.m.has_value());
  const auto point = TargetModel::gaussian_1d(0, 1e-8);
  EXPECT_NEAR(mmd2_biased_model(point, k, X).value, 0.0, 1e-3);
  EXPECT_NEAR(
      mmd2_unbiased_model(point, k, Sample::from_values({0.0, 0.0})).value, 0.0,
      1e-3);
  EXPECT_THROW(mmd2_unbiased_model(point, k, X), InvalidInput);
}

TEST(MmdModel, BruteForceAgreement) {
  std::mt19937_64 g(31);
  const auto P = TargetModel::mixture_1d({0.3, 0.7}, {-1.0, 2.0}, 0.6);
  const auto k = KernelSpec::gaussian(0.8);
  const Sample X = normal_sample(g, 40, 1, 1.5);
  const auto G = gram(k, X, X);
  double cross = 0.0;
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    cross += mean_embedding_dot(P, k, X.point(i));
  }
  const double n = 40;
  const double ee = embedding_norm_sq(P, k);
  EXPECT_NEAR(mmd2_biased_model(P, k, X).value,
              G.sum() / (n * n) + ee - 2 * cross / n, 1e-12);
  EXPECT_NEAR(mmd2_unbiased_model(P, k, X).value,
              (G.sum() - G.trace()) / (n * (n - 1)) + ee - 2 * cross / n,
              1e-12);
}

TEST(MmdModel, ConsistentUnderNull) {
  const auto P = TargetModel::gaussian_1d(0, 1);
  const auto k = KernelSpec::gaussian(1.0);
  double total = 0.0;
  for (int t = 0; t < 50; ++t) {
    RngStream rng(32, t);
    total += mmd2_biased_model(P, k, sample(P, 2000, rng)).value;
  }
  EXPECT_LE(total / 50, 0.01);
}

TEST(MmdModel, UnbiasedGapBound) {
  std::mt19937_64 g(33);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int t = 0; t < 500; ++t) {
    const auto k = t % 2 ? KernelSpec::gaussian(u(g))
                         : KernelSpec::gaussian(0.1 * u(g));
    const auto P = TargetModel::gaussian_1d(0.0, u(g));
    const Eigen::Index n = 2 + t % 30;
    const Sample X = normal_sample(g, n, 1, u(g), u(g) - 1.5);
    const double gap = std::abs(mmd2_unbiased_model(P, k, X).value -
                                mmd2_biased_model(P, k, X).value);
    EXPECT_LE(gap, k.bound() / n + 1e-12);
  }
}

TEST(MmdTwo, PinnedValuesAndSymmetry) {
  const auto k = KernelSpec::gaussian(1.0);
  const auto Y = Sample::from_values({0.0}), X = Sample::from_values({2.0});
  EXPECT_NEAR(mmd2_biased_two(k, Y, X).value, 2 - 2 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(mmd2_biased_two(k, Y, X).value, 1.729329, 1e-6);
  std::mt19937_64 g(34);
  const Sample A = normal_sample(g, 30, 2), B = normal_sample(g, 17, 2, 1, 0.5);
  EXPECT_EQ(mmd2_biased_two(k, A, B).value, mmd2_biased_two(k, B, A).value);
  EXPECT_EQ(mmd2_biased_two(k, A, A).value, 0.0);
  EXPECT_NEAR(mmd2_biased_two(k, A, B).value, brute_two(k, A, B, false), 1e-12);
  EXPECT_NEAR(mmd2_unbiased_two(k, A, B).value, brute_two(k, A, B, true),
              1e-12);
  const auto v = mmd2_unbiased_two(k, A, B);
  EXPECT_EQ(v.n, 17);
  EXPECT_EQ(*v.m, 30);
  EXPECT_THROW(mmd2_unbiased_two(k, Y, A), InvalidInput);
}

TEST(MmdTwo, PooledRepeatsGiveZero) {
  const auto k = KernelSpec::gaussian(1.0);
  std::mt19937_64 g(35);
  const Sample X = normal_sample(g, 12, 1);
  const Sample XX = concat(concat(X, X), X);
  EXPECT_NEAR(mmd2_biased_two(k, XX, X).value, 0.0, 1e-12);
}

TEST(MmdTwo, GapBoundAndUnbiasedFloor) {
  std::mt19937_64 g(36);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int t = 0; t < 500; ++t) {
    const auto k = KernelSpec::imq(u(g), -0.5);
    const Eigen::Index m = 2 + t % 25, n = 2 + (7 * t) % 19;
    const Sample Y = normal_sample(g, m, 2, u(g));
    const Sample X = normal_sample(g, n, 2, u(g), 0.3);
    const double gap = std::abs(mmd2_unbiased_two(k, Y, X).value -
                                mmd2_biased_two(k, Y, X).value);
    EXPECT_LE(gap, k.bound() / m + k.bound() / n + 1e-12);
    const double same = mmd2_unbiased_two(k, X, X).value;
    EXPECT_GE(same, -k.bound() / n - k.bound() / n - 1e-12);
  }
}

TEST(MmdTwo, TriangleInequality) {
  std::mt19937_64 g(37);
  const auto k = KernelSpec::gaussian(1.3);
  for (int t = 0; t < 500; ++t) {
    const Sample A = normal_sample(g, 5 + t % 7, 1);
    const Sample B = normal_sample(g, 4 + t % 5, 1, 1.2, 0.4);
    const Sample C = normal_sample(g, 6, 1, 0.8, -0.3);
    auto d = [&](const Sample& a, const Sample& b) {
      return std::sqrt(mmd2_biased_two(k, a, b).value);
    };
    EXPECT_LE(d(A, C), d(A, B) + d(B, C) + 1e-9);
    EXPECT_EQ(d(A, B), d(B, A));
  }
}

TEST(PopulationMmd, ClosedFormAndMonteCarlo) {
  const auto k = KernelSpec::gaussian(1.0);
  const auto P = TargetModel::gaussian_1d(0, 1);
  const auto Q = TargetModel::gaussian_1d(1, 1);
  const double exact =
      2 * std::sqrt(1.0 / 3.0) - 2 * std::sqrt(1.0 / 3.0) * std::exp(-1.0 / 6.0);
  EXPECT_NEAR(population_mmd2(P, Q, k), exact, 1e-15);
  EXPECT_NEAR(population_mmd2(P, Q, k), 0.177273, 1e-5);
  EXPECT_EQ(population_mmd2(P, P, k), 0.0);

  // Monotone in the mean gap, and matching a Monte Carlo estimate built
  // from independent pairs.
  double prev = 0.0;
  for (int s = 1; s <= 8; ++s) {
    const double dm = 0.5 * s;
    const auto Qs = TargetModel::gaussian_1d(dm, 1);
    const double v = population_mmd2(P, Qs, k);
    EXPECT_GT(v, prev);
    prev = v;
    if (s % 4 == 0) {
      RngStream r(38, s);
      const Sample a = sample(P, 200000, r), a2 = sample(P, 200000, r);
      const Sample b = sample(Qs, 200000, r), b2 = sample(Qs, 200000, r);
      std::vector<double> h(200000);
      for (Eigen::Index i = 0; i < 200000; ++i) {
        h[i] = eval_kernel(k, a.point(i), a2.point(i)) +
               eval_kernel(k, b.point(i), b2.point(i)) -
               eval_kernel(k, a.point(i), b2.point(i)) -
               eval_kernel(k, a2.point(i), b.point(i));
      }
      const auto ms = mean_se(h);
      EXPECT_LT(std::abs(ms.mean - v), 3 * ms.se) << dm;
    }
  }
  EXPECT_THROW(population_mmd2(P, TargetModel::laplace(0, 1), k), NoClosedForm);
  const auto F1 = TargetModel::finite(FiniteDist({0.5, 0.5}));
  const auto F2 = TargetModel::finite(FiniteDist({0.9, 0.1}));
  EXPECT_NEAR(population_mmd2(F1, F2, KernelSpec::delta(2)), 0.32, 1e-15);
}

TEST(SupFamily, MatchesMembers) {
  std::mt19937_64 g(39);
  const Sample Y = normal_sample(g, 40, 1), X = normal_sample(g, 30, 1, 1.5);
  const auto fam = KernelSpec::family({0.5, 1.0, 2.0});
  double best = 0.0;
  for (double w : {0.5, 1.0, 2.0}) {
    best = std::max(
        best, std::sqrt(mmd2_biased_two(KernelSpec::gaussian(w), Y, X).value));
  }
  EXPECT_EQ(sup_family(fam, Y, X), best);
  EXPECT_EQ(sup_family(KernelSpec::family({1.0}), Y, X),
            std::sqrt(mmd2_biased_two(KernelSpec::gaussian(1.0), Y, X).value));
  EXPECT_EQ(sup_family(fam, X, X), 0.0);
  EXPECT_THROW(KernelSpec::family({}), InvalidInput);
  EXPECT_THROW(sup_family(KernelSpec::gaussian(1.0), Y, X), InvalidInput);
}

TEST(ClampBiased, Policy) {
  EXPECT_EQ(clamp_biased(-5e-13), 0.0);
  EXPECT_EQ(clamp_biased(0.25), 0.25);
  EXPECT_THROW(clamp_biased(-1e-9), InternalConsistency);
}

TEST(Unbiasedness, TrialMeansMatchPopulation) {
  const auto k = KernelSpec::gaussian(1.0);
  const auto P = TargetModel::gaussian_1d(0, 1);
  const auto Q = TargetModel::gaussian_1d(1, 1);
  const double target = population_mmd2(P, Q, k);
  std::vector<double> one, two;
  for (int t = 0; t < 2000; ++t) {
    RngStream r(40, t);
    const Sample X = sample(Q, 50, r);
    const Sample Y = sample(P, 50, r);
    one.push_back(mmd2_unbiased_model(P, k, X).value);
    two.push_back(mmd2_unbiased_two(k, Y, X).value);
  }
  const auto a = mean_se(one), b = mean_se(two);
  EXPECT_LT(std::abs(a.mean - target), 3 * a.se);
  EXPECT_LT(std::abs(b.mean - target), 3 * b.se);
}

}  // namespace
}  // namespace kuht
