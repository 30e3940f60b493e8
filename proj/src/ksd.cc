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

#include "kuht/ksd.h"

#include <cmath>
#include <limits>

#include "kuht/error.h"
#include "kuht/numeric.h"
#include "kuht/quadrature.h"

namespace kuht {
namespace {

constexpr double kVstatSlack = 1e-10;

struct Profile {
  double k;     // k(x, y)
  double g;     // grad_x k = g * (x - y)
  double tr;    // trace grad_xy k
};

Profile kernel_profile(const KernelSpec& spec, double r2, double d) {
  if (const auto* gk = std::get_if<GaussianKernel>(&spec.variant())) {
    const double k = std::exp(-r2 / (2.0 * gk->w));
    return {k, -k / gk->w, (d / gk->w - r2 / (gk->w * gk->w)) * k};
  }
  if (const auto* m = std::get_if<ImqKernel>(&spec.variant())) {
    const double u = m->c * m->c + r2;
    const double u1 = std::pow(u, m->eta - 1.0);
    const double u2 = std::pow(u, m->eta - 2.0);
    return {std::pow(u, m->eta), 2.0 * m->eta * u1,
            -4.0 * m->eta * (m->eta - 1.0) * u2 * r2 - 2.0 * m->eta * d * u1};
  }
  throw Unsupported("stein kernel needs a gaussian or imq kernel");
}

double sum_upper(const Eigen::MatrixXd& H, bool with_diagonal) {
  const Eigen::Index n = H.rows();
  std::vector<double> rows(static_cast<std::size_t>(n));
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] = H.row(i).tail(n - i - 1).sum();
    diag[static_cast<std::size_t>(i)] = H(i, i);
  }
  const double off = 2.0 * pairwise_sum(rows);
  return with_diagonal ? off + pairwise_sum(diag) : off;
}

}  // namespace

SteinContext::SteinContext(TargetModel model, KernelSpec spec)
    : model_(std::move(model)), spec_(std::move(spec)) {
  if (!model_.is_continuous()) {
    throw Unsupported("KSD needs a continuous model with a score");
  }
  if (!spec_.is_differentiable()) {
    throw Unsupported("KSD needs a gaussian or imq kernel, got " +
                      spec_.to_string());
  }
}

double stein_kernel(const KernelSpec& spec, Point x, Point y, Point sx,
                    Point sy) {
  if (x.size() != y.size() || sx.size() != x.size() || sy.size() != y.size()) {
    throw InvalidInput("stein kernel: dimension mismatch");
  }
  double r2 = 0.0;
  double score_dot = 0.0;
  double drift = 0.0;  // (s(x) - s(y)) . (x - y)
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    r2 += diff * diff;
    score_dot += sx[k] * sy[k];
    drift += (sx[k] - sy[k]) * diff;
  }
  const Profile p = kernel_profile(spec, r2, static_cast<double>(x.size()));
  // s(y).grad_x k + s(x).grad_y k = (s(y) - s(x)) . g (x - y) = -g * drift
  return score_dot * p.k - p.g * drift + p.tr;
}

double stein_kernel(const SteinContext& ctx, Point x, Point y) {
  const Eigen::VectorXd sx = score(ctx.model(), x);
  const Eigen::VectorXd sy = score(ctx.model(), y);
  return stein_kernel(ctx.kernel(), x, y, sx, sy);
}

Eigen::MatrixXd stein_matrix(const SteinContext& ctx, const Sample& X) {
  const Eigen::Index n = X.n();
  Eigen::MatrixXd scores(X.d(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scores.col(i) = score(ctx.model(), X.point(i));
  }
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      H(i, j) = stein_kernel(ctx.kernel(), X.point(i), X.point(j),
                             scores.col(i), scores.col(j));
      H(j, i) = H(i, j);
    }
  }
  return H;
}

double ksd2_vstat(const Eigen::MatrixXd& H) {
  const double n = static_cast<double>(H.rows());
  const double v = sum_upper(H, true) / (n * n);
  if (v >= 0.0) return v;
  if (v >= -kVstatSlack) return 0.0;
  throw InternalConsistency("KSD V-statistic is negative: " +
                            std::to_string(v));
}

double ksd2_ustat(const Eigen::MatrixXd& H) {
  const double n = static_cast<double>(H.rows());
  if (H.rows() < 2) throw InvalidInput("KSD U-statistic needs n >= 2");
  return sum_upper(H, false) / (n * (n - 1.0));
}

double ksd2_vstat(const SteinContext& ctx, const Sample& X) {
  return ksd2_vstat(stein_matrix(ctx, X));
}

double ksd2_ustat(const SteinContext& ctx, const Sample& X) {
  if (X.n() < 2) throw InvalidInput("KSD U-statistic needs n >= 2");
  return ksd2_ustat(stein_matrix(ctx, X));
}

double stein_mean_check(const SteinContext& ctx, double y,
                        const TargetModel* against) {
  const TargetModel& q = against ? *against : ctx.model();
  if (ctx.model().dim() != 1 || q.dim() != 1) {
    throw Unsupported("stein_mean_check supports one-dimensional models");
  }
  const Window win = quadrature_window({&q, &ctx.model()});
  Eigen::VectorXd yv = Eigen::VectorXd::Constant(1, y);
  const Eigen::VectorXd sy = score(ctx.model(), yv);
  Eigen::VectorXd xv(1);
  auto integrand = [&](double t) {
    xv[0] = t;
    const double lq = log_density(q, xv) - q.log_offset();
    if (lq == -std::numeric_limits<double>::infinity()) return 0.0;
    return stein_kernel(ctx.kernel(), xv, yv, score(ctx.model(), xv), sy) *
           std::exp(lq);
  };
  std::vector<double> kinks = win.kinks;
  kinks.push_back(y);
  return integrate(integrand, win.lo, win.hi, 1e-9, kinks);
}

std::optional<int> weak_convergence_condition(const KernelSpec& spec,
                                              Eigen::Index d) {
  if (std::holds_alternative<GaussianKernel>(spec.variant()) && d == 1) {
    return 1;
  }
  if (std::holds_alternative<ImqKernel>(spec.variant())) return 3;
  return std::nullopt;
}

std::vector<std::string> ksd_warnings(const SteinContext& ctx,
                                      Eigen::Index d) {
  std::vector<std::string> out;
  if (!weak_convergence_condition(ctx.kernel(), d)) {
    out.push_back("KSD weak-convergence condition not met for kernel " +
                  ctx.kernel().to_string() + " in dimension " +
                  std::to_string(d) +
                  "; the type-II exponent guarantee does not apply");
  }
  if (std::holds_alternative<Laplace1D>(ctx.model().variant())) {
    out.push_back("KSD with a Laplace model is experimental: the score has a "
                  "kink at the location parameter");
  }
  return out;
}

}  // namespace kuht
