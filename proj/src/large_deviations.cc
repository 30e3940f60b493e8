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

#include "kuht/large_deviations.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kuht/error.h"
#include "kuht/numeric.h"

namespace kuht {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points on the closed ball boundary count as inside.
constexpr double kBoundaryTol = 1e-14;

// Budgets for the simplex grids behind the infima.
constexpr double kGridBudget = 2e6;
constexpr double kPairBudget = 4e6;

void enumerate_into(int remaining, std::size_t pos, std::vector<int>& cur,
                    std::vector<TypeVector>& out, int m) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back({cur, m});
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    cur[pos] = c;
    enumerate_into(remaining - c, pos + 1, cur, out, m);
  }
}

std::vector<double> frequencies(const TypeVector& T) {
  std::vector<double> f(T.counts.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = T.m == 0 ? 0.0 : static_cast<double>(T.counts[i]) / T.m;
  }
  return f;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void check_same_alphabet(const FiniteDist& P, const FiniteDist& Q) {
  if (P.size() != Q.size()) {
    throw InvalidInput("distributions live on different alphabets");
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("gamma must be finite and >= 0");
  }
}

// Largest resolution <= 1000 whose grid (or grid pair) fits the budget.
int grid_resolution(int t, bool pairs) {
  const double budget = pairs ? std::sqrt(kPairBudget) : kGridBudget;
  int res = 1000;
  while (res > 1 && type_count(res, t) > budget) {
    res = res > 100 ? res - 50 : res - 1;
  }
  return res;
}

// Constant allowance for the grid infimum overshooting the true infimum at
// resolution 1e-3, widened for coarser grids.
double grid_slack(int t, int resolution) {
  const double h = 1.0 / resolution;
  return h <= 1e-3 ? 0.02 : 0.02 + t * h * std::log(1.0 / h);
}

}  // namespace

double type_count(int m, int t) {
  if (m < 0 || t < 1) throw InvalidInput("type_count needs m >= 0, t >= 1");
  return std::round(std::exp(std::lgamma(m + t) - std::lgamma(m + 1.0) -
                             std::lgamma(static_cast<double>(t))));
}

std::vector<TypeVector> enumerate_types(int m, int t) {
  if (m < 0) throw InvalidInput("enumerate_types needs m >= 0");
  if (t < 2) throw InvalidInput("enumerate_types needs t >= 2");
  if (type_count(m, t) > kMaxEnumeration) {
    throw TooLarge("type enumeration exceeds 1e7 types");
  }
  std::vector<TypeVector> out;
  out.reserve(static_cast<std::size_t>(type_count(m, t)));
  std::vector<int> cur(static_cast<std::size_t>(t), 0);
  enumerate_into(m, 0, cur, out, m);
  return out;
}

double type_log_prob(const TypeVector& T, const FiniteDist& R) {
  if (T.counts.size() != R.size()) {
    throw InvalidInput("type and distribution alphabets differ");
  }
  double lp = std::lgamma(T.m + 1.0);
  for (std::size_t i = 0; i < R.size(); ++i) {
    const int c = T.counts[i];
    if (c == 0) continue;
    if (R[i] == 0.0) return -kInf;
    lp += c * std::log(R[i]) - std::lgamma(c + 1.0);
  }
  return lp;
}

TypeSandwich type_prob_sandwich(const TypeVector& T, const FiniteDist& R) {
  const double lp = type_log_prob(T, R);
  if (lp == -kInf) {
    throw SupportViolation("type puts mass outside the support");
  }
  const double D = std::max(0.0, kl_divergence(frequencies(T), R.probs()));
  const double t = static_cast<double>(R.size());
  const double upper = std::exp(-T.m * D);
  const double lower = std::exp(-t * std::log(T.m + 1.0) - T.m * D);
  return {lower, std::exp(lp), upper};
}

double delta_mmd2(const FiniteDist& p, const TypeVector& T) {
  if (T.counts.size() != p.size()) {
    throw InvalidInput("type and distribution alphabets differ");
  }
  return sq_dist(p.probs(), frequencies(T));
}

ExactErrors exact_error_probs(const FiniteDist& P, const FiniteDist& Q,
                              double gamma, int n) {
  check_same_alphabet(P, Q);
  check_gamma(gamma);
  if (n < 1) throw InvalidInput("exact_error_probs needs n >= 1");
  const auto types = enumerate_types(n, static_cast<int>(P.size()));
  const double g2 = gamma * gamma;
  std::vector<double> rejected_p, accepted_q;
  for (const auto& T : types) {
    if (delta_mmd2(P, T) <= g2 + kBoundaryTol) {
      accepted_q.push_back(type_log_prob(T, Q));
    } else {
      rejected_p.push_back(type_log_prob(T, P));
    }
  }
  ExactErrors e;
  e.log_type1 = rejected_p.empty() ? -kInf : log_sum_exp(rejected_p);
  e.log_type2 = accepted_q.empty() ? -kInf : log_sum_exp(accepted_q);
  // A region covering every type (or none) gives the exact value rather
  // than a sum that rounds to 1 - eps.
  if (accepted_q.empty()) e.log_type1 = 0.0;
  if (rejected_p.empty()) e.log_type2 = 0.0;
  e.log_type1 = std::min(e.log_type1, 0.0);
  e.log_type2 = std::min(e.log_type2, 0.0);
  e.type1 = std::exp(e.log_type1);
  e.type2 = std::exp(e.log_type2);
  return e;
}

double dstar(const FiniteDist& P, const FiniteDist& Q, double c) {
  check_same_alphabet(P, Q);
  if (!(c > 0.0 && c < 1.0)) throw InvalidInput("dstar needs c in (0, 1)");
  std::vector<double> terms;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] > 0.0 && Q[i] > 0.0) {
      terms.push_back(std::pow(P[i], c) * std::pow(Q[i], 1.0 - c));
    }
  }
  if (terms.empty()) return kInf;
  return std::max(0.0, -std::log(pairwise_sum(terms)));
}

std::vector<std::vector<double>> simplex_grid(int t, int resolution) {
  if (resolution < 1) throw InvalidInput("grid resolution must be >= 1");
  const auto types = enumerate_types(resolution, t);
  std::vector<std::vector<double>> out;
  out.reserve(types.size());
  for (const auto& T : types) out.push_back(frequencies(T));
  return out;
}

double dstar_grid(const FiniteDist& P, const FiniteDist& Q, double c,
                  int resolution) {
  check_same_alphabet(P, Q);
  if (!(c > 0.0 && c < 1.0)) throw InvalidInput("dstar needs c in (0, 1)");
  double best = kInf;
  for (const auto& R : simplex_grid(static_cast<int>(P.size()), resolution)) {
    const double v =
        c * kl_divergence(R, P.probs()) + (1.0 - c) * kl_divergence(R, Q.probs());
    best = std::min(best, v);
  }
  return best;
}

SanovReport sanov_sandwich_check(const FiniteDist& P, const FiniteDist& Q,
                                 double gamma, int n) {
  check_same_alphabet(P, Q);
  check_gamma(gamma);
  if (n < 1) throw InvalidInput("sanov check needs n >= 1");
  const int t = static_cast<int>(P.size());
  const double g2 = gamma * gamma;
  SanovReport r;
  r.n = n;
  r.gamma = gamma;
  r.type_slack = t * std::log(n + 1.0) / n;

  std::vector<double> inside;
  r.i_type = kInf;
  for (const auto& T : enumerate_types(n, t)) {
    if (delta_mmd2(P, T) > g2 + kBoundaryTol) continue;
    const double lp = type_log_prob(T, Q);
    if (lp == -kInf) continue;
    inside.push_back(lp);
    r.i_type = std::min(r.i_type, kl_divergence(frequencies(T), Q.probs()));
  }
  r.grid_resolution = grid_resolution(t, false);
  r.grid_slack = grid_slack(t, r.grid_resolution);
  r.i_min = kInf;
  for (const auto& R : simplex_grid(t, r.grid_resolution)) {
    if (sq_dist(P.probs(), R) > g2 + kBoundaryTol) continue;
    r.i_min = std::min(r.i_min, kl_divergence(R, Q.probs()));
  }
  if (inside.empty()) {
    r.vacuous = true;
    r.log_prob = -kInf;
    r.rate = kInf;
    return r;
  }
  r.log_prob = std::min(0.0, log_sum_exp(inside));
  r.rate = -r.log_prob / n;
  r.lower_ok = r.i_min - r.type_slack - r.grid_slack <= r.rate;
  r.upper_ok = r.rate <= r.i_type + r.type_slack;
  return r;
}

bool rates_nonincreasing(const std::vector<SanovReport>& reports,
                         double slack) {
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].rate > reports[i - 1].rate + slack) return false;
  }
  return true;
}

double extended_grid_infimum(const FiniteDist& P, const FiniteDist& Q,
                             double gamma, double c, int resolution) {
  check_same_alphabet(P, Q);
  check_gamma(gamma);
  const auto grid = simplex_grid(static_cast<int>(P.size()), resolution);
  if (static_cast<double>(grid.size()) * grid.size() > kPairBudget * 1.01) {
    throw TooLarge("grid pair search exceeds its budget");
  }
  std::vector<double> dp(grid.size()), dq(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dp[i] = c * kl_divergence(grid[i], P.probs());
    dq[i] = (1.0 - c) * kl_divergence(grid[i], Q.probs());
  }
  const double g2 = gamma * gamma;
  double best = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (dp[i] >= best) continue;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = dp[i] + dq[j];
      if (v >= best) continue;
      if (sq_dist(grid[i], grid[j]) <= g2 + kBoundaryTol) best = v;
    }
  }
  return best;
}

ExtendedSanovReport extended_sanov_check(const FiniteDist& P,
                                         const FiniteDist& Q, double gamma,
                                         int m, int n) {
  check_same_alphabet(P, Q);
  check_gamma(gamma);
  if (m < 1 || n < 1) throw InvalidInput("extended check needs m, n >= 1");
  const int t = static_cast<int>(P.size());
  if (type_count(m, t) * type_count(n, t) > kMaxEnumeration) {
    throw TooLarge("type pair enumeration exceeds 1e7 pairs");
  }
  const auto tm = enumerate_types(m, t);
  const auto tn = enumerate_types(n, t);
  const double g2 = gamma * gamma;
  const double total = static_cast<double>(m + n);

  ExtendedSanovReport r;
  r.m = m;
  r.n = n;
  r.gamma = gamma;
  r.c = m / total;
  r.type_slack = t * (std::log(m + 1.0) + std::log(n + 1.0)) / total;

  std::vector<std::vector<double>> fm, fn;
  std::vector<double> lpm, lpn, dm, dn;
  for (const auto& T : tm) {
    fm.push_back(frequencies(T));
    lpm.push_back(type_log_prob(T, P));
    dm.push_back(kl_divergence(fm.back(), P.probs()));
  }
  for (const auto& U : tn) {
    fn.push_back(frequencies(U));
    lpn.push_back(type_log_prob(U, Q));
    dn.push_back(kl_divergence(fn.back(), Q.probs()));
  }
  std::vector<double> inside;
  r.j_type = kInf;
  for (std::size_t i = 0; i < tm.size(); ++i) {
    if (lpm[i] == -kInf) continue;
    for (std::size_t j = 0; j < tn.size(); ++j) {
      if (lpn[j] == -kInf) continue;
      if (sq_dist(fm[i], fn[j]) > g2 + kBoundaryTol) continue;
      inside.push_back(lpm[i] + lpn[j]);
      // m D(T/m||P) + n D(U/n||Q) = (m+n) [c D + (1-c) D].
      r.j_type = std::min(r.j_type, (m * dm[i] + n * dn[j]) / total);
    }
  }
  r.grid_resolution = grid_resolution(t, true);
  r.grid_slack = grid_slack(t, r.grid_resolution);
  r.j_min = extended_grid_infimum(P, Q, gamma, r.c, r.grid_resolution);
  if (inside.empty()) {
    r.vacuous = true;
    r.log_prob = -kInf;
    r.rate = kInf;
    return r;
  }
  r.log_prob = std::min(0.0, log_sum_exp(inside));
  r.rate = -r.log_prob / total;
  r.lower_ok = r.j_min - r.type_slack - r.grid_slack <= r.rate;
  r.upper_ok = r.rate <= r.j_type + r.type_slack;
  return r;
}

}  // namespace kuht
