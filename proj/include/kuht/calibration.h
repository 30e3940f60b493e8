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

#ifndef KUHT_CALIBRATION_H_
#define KUHT_CALIBRATION_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kuht/kernels.h"
#include "kuht/ksd.h"
#include "kuht/rng.h"
#include "kuht/targets.h"

namespace kuht {

// Test statistics known to the calibration layer.
enum class Statistic {
  kMmdBiasedModel,    // d_k^2(P, Q_n)
  kMmdUnbiasedModel,  // d_u^2(P, Q_n)
  kMmdBiasedTwo,      // d_k^2(P_m, Q_n)
  kMmdUnbiasedTwo,    // d_u^2(P_m, Q_n)
  kSupFamily,         // sup_k d_k(P_m, Q_n), not squared
  kKsdV,              // d_S^2(P, Q_n), V-statistic
  kKsdU,              // U-statistic
  kLr,                // (1/n) sum log q(x_i)/p(x_i)
};

struct StatisticTraits {
  std::string_view name;
  bool squared_scale;  // statistic is an MMD^2 / KSD^2 value
  bool two_sample;
};

StatisticTraits traits(Statistic s);
Statistic parse_statistic(std::string_view name);

// Distribution-free threshold formulas, each on the scale of the statistic
// it was derived for:
//   kSimple          gamma_n = sqrt(2K/n)(1 + sqrt(-log a))          on d_k
//   kSimpleUnbiased  gamma_n^2 + K/n                                  on d_u^2
//   kTwo             (sqrt(K/m) + sqrt(K/n))(2 + sqrt(-2 log(a/2)))   on d_k
//   kTwoUnbiased     gamma_{m,n}^2 + K/m + K/n                        on d_u^2
//   kTwoTight        (4K/sqrt(n)) sqrt(log(1/a)), requires m == n     on d_u^2
//   kKsd             sqrt(1/n)(1 + sqrt(-log a))                      on d_S^2
//   kKsdUnbiased     kKsd + H_p/n                                     on d_S(u)^2
enum class DfreeKind {
  kSimple,
  kSimpleUnbiased,
  kTwo,
  kTwoUnbiased,
  kTwoTight,
  kKsd,
  kKsdUnbiased,
};

DfreeKind parse_dfree_kind(std::string_view name);

// `stein_bound` is H_p, required for kKsdUnbiased only.
double dfree_threshold(DfreeKind kind, double K, Eigen::Index n,
                       std::optional<Eigen::Index> m, double alpha,
                       std::optional<double> stein_bound = std::nullopt);

// The distribution-free threshold expressed on the scale of `statistic`:
// the simple and two-sample gammas are squared for the squared statistics,
// and the KSD gamma applies to d_S^2 directly. Throws Unsupported for kLr.
double dfree_threshold_for(Statistic statistic, double K, Eigen::Index n,
                           std::optional<Eigen::Index> m, double alpha,
                           std::optional<double> stein_bound = std::nullopt);

enum class RuleKind { kDfree, kMonteCarlo, kPermutation, kWild, kMinCombo };

struct ThresholdRule {
  RuleKind kind = RuleKind::kDfree;
  RuleKind inner = RuleKind::kDfree;  // data-driven leg of kMinCombo
  int replicates = 0;                 // B, >= 50 for data-driven rules
  double alpha = 0.1;

  // The data-driven kind actually resampled (inner for kMinCombo).
  RuleKind data_kind() const {
    return kind == RuleKind::kMinCombo ? inner : kind;
  }
  std::string to_string() const;
};

// Parses `dfree`, `mc:B=500`, `perm:B=500`, `wild:B=500`, `min:mc:B=500`.
ThresholdRule parse_threshold_rule(std::string_view text, double alpha);

void check_alpha(double alpha);

// 1-based rank ceil((1 - alpha)(B + 1)), capped at B.
Eigen::Index quantile_rank(double alpha, Eigen::Index B);

// Sorts the replicates and returns the quantile_rank order statistic.
double order_statistic_threshold(std::vector<double> replicates, double alpha);

using SampleStatistic = std::function<double(const Sample&)>;

// Draws B fresh size-n samples from `model` (replicate b uses rng.child(b))
// and returns the (1 - alpha) order statistic of `statistic` over them.
double mc_threshold(const TargetModel& model, Eigen::Index n, double alpha,
                    int B, const RngStream& rng,
                    const SampleStatistic& statistic);

// Same, for the model-only statistics kMmdBiasedModel, kMmdUnbiasedModel,
// kKsdV and kKsdU.
double mc_threshold(const TargetModel& model, const KernelSpec& spec,
                    Statistic statistic, Eigen::Index n, double alpha, int B,
                    const RngStream& rng);

// Permutation replicates of a two-sample statistic. Replicate b draws a
// uniformly random relabelling of the pooled m + n points from rng.child(b).
// Kernel sums go through a pivoted-Cholesky factor of the pooled Gram matrix
// (residual trace <= N * 1e-12), so each replicate costs O(min(m,n) rank).
std::vector<double> permutation_replicates(const KernelSpec& spec,
                                           const Sample& Y, const Sample& X,
                                           Statistic statistic, int B,
                                           const RngStream& rng);

// The rows of the pooled sample (Y first, then X) assigned to the smaller
// group in replicate stream `child`; the larger group gets the rest.
std::vector<Eigen::Index> permutation_subset(RngStream child, Eigen::Index N,
                                             Eigen::Index s);

double permutation_threshold(const KernelSpec& spec, const Sample& Y,
                             const Sample& X, Statistic statistic,
                             double alpha, int B, const RngStream& rng);

// One wild-bootstrap replicate for signs W: (1/n^2) W'HW for kKsdV, or the
// diagonal-free version scaled by 1/(n(n-1)) for kKsdU. Sums in the same
// order as ksd2_vstat/ksd2_ustat, so W = 1 reproduces them exactly.
double wild_replicate(const Eigen::MatrixXd& H, const Eigen::VectorXd& W,
                      Statistic statistic);

// Rademacher signs for replicate stream `child`.
Eigen::VectorXd rademacher(RngStream child, Eigen::Index n);

// B wild-bootstrap replicates from a precomputed Stein matrix.
std::vector<double> wild_replicates(const Eigen::MatrixXd& H,
                                    Statistic statistic, int B,
                                    const RngStream& rng);

double wild_threshold(const Eigen::MatrixXd& H, Statistic statistic,
                      double alpha, int B, const RngStream& rng);
double wild_threshold(const SteinContext& ctx, const Sample& X,
                      Statistic statistic, double alpha, int B,
                      const RngStream& rng);

// min(data_driven, dfree). Both must already be on the statistic's scale.
double combine_min(double data_driven, double dfree);

}  // namespace kuht

#endif  // KUHT_CALIBRATION_H_
