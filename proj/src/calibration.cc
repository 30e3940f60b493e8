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

#include "kuht/calibration.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "kuht/error.h"
#include "kuht/mmd.h"
#include "kuht/numeric.h"
#include "parse_util.h"

namespace kuht {
namespace {

void require_replicates(int B) {
  if (B < 50) {
    throw InvalidInput("data-driven thresholds need B >= 50 replicates");
  }
}

double simple_gamma(double K, double n, double alpha) {
  return std::sqrt(2.0 * K / n) * (1.0 + std::sqrt(-std::log(alpha)));
}

double two_gamma(double K, double m, double n, double alpha) {
  return (std::sqrt(K / m) + std::sqrt(K / n)) *
         (2.0 + std::sqrt(-2.0 * std::log(alpha / 2.0)));
}

double ksd_gamma(double n, double alpha) {
  return std::sqrt(1.0 / n) * (1.0 + std::sqrt(-std::log(alpha)));
}

// Selects s of the N pooled rows by a partial Fisher-Yates shuffle of idx,
// which must hold the identity on entry and is restored before returning.
void select_subset(std::mt19937_64& eng, std::vector<Eigen::Index>& idx,
                   Eigen::Index s, std::vector<Eigen::Index>& chosen,
                   std::vector<Eigen::Index>& swaps) {
  const Eigen::Index N = static_cast<Eigen::Index>(idx.size());
  swaps.resize(static_cast<std::size_t>(s));
  chosen.resize(static_cast<std::size_t>(s));
  for (Eigen::Index k = 0; k < s; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, N - 1);
    const Eigen::Index j = pick(eng);
    swaps[static_cast<std::size_t>(k)] = j;
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    chosen[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k)];
  }
  for (Eigen::Index k = s - 1; k >= 0; --k) {
    std::swap(idx[static_cast<std::size_t>(k)],
              idx[static_cast<std::size_t>(swaps[static_cast<std::size_t>(k)])]);
  }
}

}  // namespace

// --- statistics ----------------------------------------------------------------

StatisticTraits traits(Statistic s) {
  switch (s) {
    case Statistic::kMmdBiasedModel:
      return {"mmd_biased_model", true, false};
    case Statistic::kMmdUnbiasedModel:
      return {"mmd_unbiased_model", true, false};
    case Statistic::kMmdBiasedTwo:
      return {"mmd_biased_two", true, true};
    case Statistic::kMmdUnbiasedTwo:
      return {"mmd_unbiased_two", true, true};
    case Statistic::kSupFamily:
      return {"sup_family", false, true};
    case Statistic::kKsdV:
      return {"ksd_vstat", true, false};
    case Statistic::kKsdU:
      return {"ksd_ustat", true, false};
    case Statistic::kLr:
      return {"lr", false, false};
  }
  throw InvalidInput("unknown statistic");
}

Statistic parse_statistic(std::string_view name) {
  for (Statistic s :
       {Statistic::kMmdBiasedModel, Statistic::kMmdUnbiasedModel,
        Statistic::kMmdBiasedTwo, Statistic::kMmdUnbiasedTwo,
        Statistic::kSupFamily, Statistic::kKsdV, Statistic::kKsdU,
        Statistic::kLr}) {
    if (traits(s).name == name) return s;
  }
  throw InvalidInput("unknown statistic '" + std::string(name) + "'");
}

// --- distribution-free thresholds ---------------------------------------------

DfreeKind parse_dfree_kind(std::string_view name) {
  if (name == "simple") return DfreeKind::kSimple;
  if (name == "simple_u") return DfreeKind::kSimpleUnbiased;
  if (name == "two") return DfreeKind::kTwo;
  if (name == "two_u") return DfreeKind::kTwoUnbiased;
  if (name == "two_tight") return DfreeKind::kTwoTight;
  if (name == "ksd") return DfreeKind::kKsd;
  if (name == "ksd_u") return DfreeKind::kKsdUnbiased;
  throw InvalidInput("unknown distribution-free threshold '" +
                     std::string(name) + "'");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1)");
  }
}

double dfree_threshold(DfreeKind kind, double K, Eigen::Index n,
                       std::optional<Eigen::Index> m, double alpha,
                       std::optional<double> stein_bound) {
  check_alpha(alpha);
  if (n < 1) throw InvalidInput("threshold needs n >= 1");
  if (!(K > 0.0)) throw InvalidInput("kernel bound K must be > 0");
  const double nd = static_cast<double>(n);
  auto need_m = [&]() {
    if (!m || *m < 1) {
      throw InvalidInput("two-sample threshold needs the model sample size m");
    }
    return static_cast<double>(*m);
  };
  switch (kind) {
    case DfreeKind::kSimple:
      return simple_gamma(K, nd, alpha);
    case DfreeKind::kSimpleUnbiased: {
      const double g = simple_gamma(K, nd, alpha);
      return g * g + K / nd;
    }
    case DfreeKind::kTwo:
      return two_gamma(K, need_m(), nd, alpha);
    case DfreeKind::kTwoUnbiased: {
      const double md = need_m();
      const double g = two_gamma(K, md, nd, alpha);
      return g * g + K / md + K / nd;
    }
    case DfreeKind::kTwoTight:
      if (need_m() != nd) {
        throw InvalidInput("the tight two-sample threshold requires m == n");
      }
      return 4.0 * K / std::sqrt(nd) * std::sqrt(std::log(1.0 / alpha));
    case DfreeKind::kKsd:
      return ksd_gamma(nd, alpha);
    case DfreeKind::kKsdUnbiased:
      if (!stein_bound) {
        throw InvalidInput("unbiased KSD threshold needs the bound H_p");
      }
      return ksd_gamma(nd, alpha) + *stein_bound / nd;
  }
  throw InvalidInput("unknown threshold kind");
}

double dfree_threshold_for(Statistic statistic, double K, Eigen::Index n,
                           std::optional<Eigen::Index> m, double alpha,
                           std::optional<double> stein_bound) {
  switch (statistic) {
    case Statistic::kMmdBiasedModel: {
      const double g = dfree_threshold(DfreeKind::kSimple, K, n, m, alpha);
      return g * g;
    }
    case Statistic::kMmdUnbiasedModel:
      return dfree_threshold(DfreeKind::kSimpleUnbiased, K, n, m, alpha);
    case Statistic::kMmdBiasedTwo: {
      const double g = dfree_threshold(DfreeKind::kTwo, K, n, m, alpha);
      return g * g;
    }
    case Statistic::kMmdUnbiasedTwo:
      return dfree_threshold(DfreeKind::kTwoUnbiased, K, n, m, alpha);
    case Statistic::kSupFamily:
      return dfree_threshold(DfreeKind::kTwo, K, n, m, alpha);
    case Statistic::kKsdV:
      return dfree_threshold(DfreeKind::kKsd, K, n, m, alpha);
    case Statistic::kKsdU:
      return dfree_threshold(DfreeKind::kKsdUnbiased, K, n, m, alpha,
                             stein_bound);
    case Statistic::kLr:
      break;
  }
  throw Unsupported("the likelihood-ratio statistic has no distribution-free "
                    "threshold");
}

// --- rules ------------------------------------------------------------------------

std::string ThresholdRule::to_string() const {
  auto name = [](RuleKind k) -> std::string {
    switch (k) {
      case RuleKind::kDfree:
        return "dfree";
      case RuleKind::kMonteCarlo:
        return "mc";
      case RuleKind::kPermutation:
        return "perm";
      case RuleKind::kWild:
        return "wild";
      case RuleKind::kMinCombo:
        return "min";
    }
    return "?";
  };
  if (kind == RuleKind::kDfree) return "dfree";
  const std::string leg = name(data_kind()) + ":B=" + std::to_string(replicates);
  return kind == RuleKind::kMinCombo ? "min:" + leg : leg;
}

ThresholdRule parse_threshold_rule(std::string_view text, double alpha) {
  using namespace detail;
  check_alpha(alpha);
  ThresholdRule rule;
  rule.alpha = alpha;
  if (text == "dfree") return rule;
  std::string_view body = text;
  const bool is_min = body.substr(0, 4) == "min:";
  if (is_min) body.remove_prefix(4);
  const auto colon = body.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("threshold rule needs 'kind:B=..', got '" +
                       std::string(text) + "'");
  }
  const auto name = body.substr(0, colon);
  RuleKind kind;
  if (name == "mc") {
    kind = RuleKind::kMonteCarlo;
  } else if (name == "perm") {
    kind = RuleKind::kPermutation;
  } else if (name == "wild") {
    kind = RuleKind::kWild;
  } else {
    throw InvalidInput("unknown threshold rule '" + std::string(name) + "'");
  }
  const auto kv = parse_key_values(body.substr(colon + 1), "threshold rule");
  reject_unknown_keys(kv, {"B"}, "threshold rule");
  const long long B = parse_int(require_key(kv, "B", "threshold rule"), "B");
  if (B < 50 || B > 1000000) {
    throw InvalidInput("threshold rule needs 50 <= B <= 1e6");
  }
  rule.replicates = static_cast<int>(B);
  rule.kind = is_min ? RuleKind::kMinCombo : kind;
  rule.inner = kind;
  return rule;
}

// --- quantiles ---------------------------------------------------------------------

Eigen::Index quantile_rank(double alpha, Eigen::Index B) {
  check_alpha(alpha);
  if (B < 1) throw InvalidInput("need at least one replicate");
  // The small offset keeps exact products such as 0.9 * 500 from rounding
  // up past an integer.
  const double raw = (1.0 - alpha) * static_cast<double>(B + 1);
  const auto rank = static_cast<Eigen::Index>(std::ceil(raw - 1e-9));
  return std::clamp<Eigen::Index>(rank, 1, B);
}

double order_statistic_threshold(std::vector<double> replicates,
                                 double alpha) {
  const auto B = static_cast<Eigen::Index>(replicates.size());
  const Eigen::Index rank = quantile_rank(alpha, B);
  std::sort(replicates.begin(), replicates.end());
  return replicates[static_cast<std::size_t>(rank - 1)];
}

// --- Monte Carlo ------------------------------------------------------------------

double mc_threshold(const TargetModel& model, Eigen::Index n, double alpha,
                    int B, const RngStream& rng,
                    const SampleStatistic& statistic) {
  check_alpha(alpha);
  require_replicates(B);
  std::vector<double> reps(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    RngStream child = rng.child(static_cast<std::uint64_t>(b));
    reps[static_cast<std::size_t>(b)] = statistic(sample(model, n, child));
  }
  return order_statistic_threshold(std::move(reps), alpha);
}

double mc_threshold(const TargetModel& model, const KernelSpec& spec,
                    Statistic statistic, Eigen::Index n, double alpha, int B,
                    const RngStream& rng) {
  SampleStatistic fn;
  switch (statistic) {
    case Statistic::kMmdBiasedModel:
      fn = [&](const Sample& X) {
        return mmd2_biased_model(model, spec, X).value;
      };
      break;
    case Statistic::kMmdUnbiasedModel:
      fn = [&](const Sample& X) {
        return mmd2_unbiased_model(model, spec, X).value;
      };
      break;
    case Statistic::kKsdV:
    case Statistic::kKsdU: {
      auto ctx = std::make_shared<SteinContext>(model, spec);
      const bool v = statistic == Statistic::kKsdV;
      fn = [ctx, v](const Sample& X) {
        return v ? ksd2_vstat(*ctx, X) : ksd2_ustat(*ctx, X);
      };
      break;
    }
    default:
      throw InvalidInput(std::string("mc_threshold cannot simulate ") +
                         std::string(traits(statistic).name) +
                         " from the model alone");
  }
  return mc_threshold(model, n, alpha, B, rng, fn);
}

// --- permutation ---------------------------------------------------------------------

std::vector<Eigen::Index> permutation_subset(RngStream child, Eigen::Index N,
                                             Eigen::Index s) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::vector<Eigen::Index> chosen, swaps;
  select_subset(child.engine(), idx, s, chosen, swaps);
  return chosen;
}

std::vector<double> permutation_replicates(const KernelSpec& spec,
                                           const Sample& Y, const Sample& X,
                                           Statistic statistic, int B,
                                           const RngStream& rng) {
  if (statistic != Statistic::kMmdBiasedTwo &&
      statistic != Statistic::kMmdUnbiasedTwo &&
      statistic != Statistic::kSupFamily) {
    throw InvalidInput("permutation calibration supports the two-sample MMD "
                       "statistics only");
  }
  if (statistic == Statistic::kSupFamily && !spec.is_family()) {
    throw InvalidInput("sup_family needs a kernel family");
  }
  if (statistic != Statistic::kSupFamily && spec.is_family()) {
    throw InvalidInput("use sup_family for kernel families");
  }
  require_replicates(B);
  const Eigen::Index m = Y.n();
  const Eigen::Index n = X.n();
  const Eigen::Index N = m + n;
  if (N < 4) throw InvalidInput("permutation test needs m + n >= 4");
  if (statistic == Statistic::kMmdUnbiasedTwo && (m < 2 || n < 2)) {
    throw InvalidInput("unbiased two-sample MMD needs m, n >= 2");
  }
  const Sample Z = concat(Y, X);
  const auto members = spec.members();
  std::vector<GramFactor> factors;
  std::vector<Eigen::RowVectorXd> totals;
  std::vector<double> diag_totals;
  for (const auto& k : members) {
    factors.push_back(pivoted_cholesky(k, Z));
    totals.push_back(factors.back().L.colwise().sum());
    diag_totals.push_back(factors.back().diagonal.sum());
  }

  // The smaller group is drawn explicitly; the other is its complement.
  const bool x_small = n <= m;
  const Eigen::Index s = x_small ? n : m;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  std::vector<double> reps(static_cast<std::size_t>(B));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::vector<Eigen::Index> chosen, swaps;
  for (int b = 0; b < B; ++b) {
    RngStream child = rng.child(static_cast<std::uint64_t>(b));
    select_subset(child.engine(), idx, s, chosen, swaps);
    double best = 0.0;
    double value = 0.0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& L = factors[f].L;
      Eigen::RowVectorXd small = Eigen::RowVectorXd::Zero(L.cols());
      double small_diag = 0.0;
      for (Eigen::Index i : chosen) {
        small += L.row(i);
        small_diag += factors[f].diagonal[i];
      }
      const Eigen::RowVectorXd big = totals[f] - small;
      const double big_diag = diag_totals[f] - small_diag;
      const Eigen::RowVectorXd& sy = x_small ? big : small;
      const Eigen::RowVectorXd& sx = x_small ? small : big;
      if (statistic == Statistic::kMmdUnbiasedTwo) {
        const double dy = x_small ? big_diag : small_diag;
        const double dx = x_small ? small_diag : big_diag;
        value = (sy.squaredNorm() - dy) / (md * (md - 1.0)) +
                (sx.squaredNorm() - dx) / (nd * (nd - 1.0)) -
                2.0 * sy.dot(sx) / (md * nd);
      } else {
        value = (sy / md - sx / nd).squaredNorm();
        best = std::max(best, std::sqrt(value));
      }
    }
    reps[static_cast<std::size_t>(b)] =
        statistic == Statistic::kSupFamily ? best : value;
  }
  return reps;
}

double permutation_threshold(const KernelSpec& spec, const Sample& Y,
                             const Sample& X, Statistic statistic,
                             double alpha, int B, const RngStream& rng) {
  check_alpha(alpha);
  return order_statistic_threshold(
      permutation_replicates(spec, Y, X, statistic, B, rng), alpha);
}

// --- wild bootstrap ------------------------------------------------------------------

Eigen::VectorXd rademacher(RngStream child, Eigen::Index n) {
  Eigen::VectorXd w(n);
  auto& eng = child.engine();
  std::uint64_t bits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = eng();
    w[i] = (bits & 1u) ? 1.0 : -1.0;
    bits >>= 1;
  }
  return w;
}

double wild_replicate(const Eigen::MatrixXd& H, const Eigen::VectorXd& W,
                      Statistic statistic) {
  const Eigen::Index n = H.rows();
  if (W.size() != n) throw InvalidInput("sign vector has the wrong length");
  const Eigen::MatrixXd signed_H = W.asDiagonal() * H * W.asDiagonal();
  if (statistic == Statistic::kKsdV) return ksd2_vstat(signed_H);
  if (statistic == Statistic::kKsdU) return ksd2_ustat(signed_H);
  throw InvalidInput("wild bootstrap supports ksd_vstat and ksd_ustat only");
}

std::vector<double> wild_replicates(const Eigen::MatrixXd& H,
                                    Statistic statistic, int B,
                                    const RngStream& rng) {
  if (statistic != Statistic::kKsdV && statistic != Statistic::kKsdU) {
    throw InvalidInput("wild bootstrap supports ksd_vstat and ksd_ustat only");
  }
  require_replicates(B);
  const Eigen::Index n = H.rows();
  if (n < 2) throw InvalidInput("wild bootstrap needs n >= 2");
  Eigen::MatrixXd W(n, B);
  for (int b = 0; b < B; ++b) {
    W.col(b) = rademacher(rng.child(static_cast<std::uint64_t>(b)), n);
  }
  const Eigen::MatrixXd HW = H * W;
  const Eigen::RowVectorXd quad = W.cwiseProduct(HW).colwise().sum();
  const double nd = static_cast<double>(n);
  const double trace = H.trace();
  std::vector<double> reps(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    reps[static_cast<std::size_t>(b)] =
        statistic == Statistic::kKsdV ? quad[b] / (nd * nd)
                                      : (quad[b] - trace) / (nd * (nd - 1.0));
  }
  return reps;
}

double wild_threshold(const Eigen::MatrixXd& H, Statistic statistic,
                      double alpha, int B, const RngStream& rng) {
  check_alpha(alpha);
  return order_statistic_threshold(wild_replicates(H, statistic, B, rng),
                                   alpha);
}

double wild_threshold(const SteinContext& ctx, const Sample& X,
                      Statistic statistic, double alpha, int B,
                      const RngStream& rng) {
  if (X.n() < 2) throw InvalidInput("wild bootstrap needs n >= 2");
  return wild_threshold(stein_matrix(ctx, X), statistic, alpha, B, rng);
}

double combine_min(double data_driven, double dfree) {
  if (!std::isfinite(data_driven) || !std::isfinite(dfree)) {
    throw InvalidInput("combine_min needs finite thresholds");
  }
  return std::min(data_driven, dfree);
}

}  // namespace kuht
