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

#ifndef KUHT_HARNESS_H_
#define KUHT_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kuht/calibration.h"
#include "kuht/finite_dist.h"
#include "kuht/kernels.h"
#include "kuht/rng.h"
#include "kuht/targets.h"

namespace kuht {

enum class TestKind {
  kSimpleMmd,
  kTwoSampleMmd,
  kKsdV,
  kKsdU,
  kSupFamily,
  kLrOracle,
};

std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view name);

struct MRule {
  enum class Kind { kPow15, kEqual, kRatio };
  Kind kind = Kind::kPow15;
  double c = 0.5;  // target m / (m + n) for kRatio

  std::string to_string() const;
};

// `pow15`, `equal` or `ratio:c=0.5`.
MRule parse_m_rule(std::string_view text);

// pow15 -> ceil(n^1.5), equal -> n, ratio -> ceil(n c / (1 - c)).
Eigen::Index m_rule(Eigen::Index n, const MRule& rule);

enum class BandwidthMode {
  kFixed,   // use config.kernel as given
  kMedian,  // Gaussian kernel with the median heuristic
};

struct ExperimentConfig {
  std::string name = "test";
  TestKind kind = TestKind::kSimpleMmd;
  TargetModel model_p = TargetModel::gaussian_1d(0.0, 1.0);  // null model
  TargetModel model_q = TargetModel::gaussian_1d(0.0, 1.0);  // alternative
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  BandwidthMode bandwidth = BandwidthMode::kFixed;
  bool unbiased = false;  // MMD tests: U-statistic instead of V-statistic
  ThresholdRule rule;
  double alpha = 0.1;
  std::vector<Eigen::Index> n_grid = {100};
  MRule m_rule;
  int trials = 500;
  std::uint64_t seed = 42;
  std::map<std::string, double> metadata;

  // Throws InvalidInput on empty grids, bad alpha, or rules that do not
  // apply to the test kind.
  void validate() const;
};

// The statistic a test kind computes.
Statistic statistic_of(const ExperimentConfig& config);

enum class Decision { kAcceptH0, kRejectH0 };

struct TestReport {
  Statistic statistic_kind = Statistic::kMmdBiasedModel;
  double statistic = 0.0;
  double threshold = 0.0;
  ThresholdRule rule;
  Decision decision = Decision::kAcceptH0;
  std::optional<double> data_threshold;   // resampled leg, if any
  std::optional<double> dfree_threshold;  // when the statistic has one
  std::string kernel;
  std::vector<std::string> warnings;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  bool rejects() const { return decision == Decision::kRejectH0; }
};

// Work shared by every trial at one sample size: a model-side bandwidth for
// the simple test and any Monte Carlo threshold that does not depend on the
// observed data.
struct SizePlan {
  Eigen::Index n = 0;
  std::optional<Eigen::Index> m;
  std::optional<KernelSpec> kernel;
  std::optional<double> data_threshold;
};

SizePlan plan_size(const ExperimentConfig& config, Eigen::Index n,
                   const RngStream& rng);

// Runs one test on X (and the model sample Y for two-sample kinds).
// Resampling uses rng.child(2). Without a plan, every threshold is computed
// from scratch.
TestReport run_test(const ExperimentConfig& config, const Sample& X,
                    const Sample* Y, const RngStream& rng,
                    const SizePlan* plan = nullptr);

// (1/n) sum_i log q(x_i) / p(x_i). Throws SupportViolation on -inf.
double lr_statistic(const TargetModel& P, const TargetModel& Q,
                    const Sample& X);

TestReport lr_oracle(const TargetModel& P, const TargetModel& Q,
                     const Sample& X, double alpha, int B,
                     const RngStream& rng);

struct ErrorRow {
  Eigen::Index n = 0;
  std::optional<Eigen::Index> m;
  int trials = 0;
  double type1_hat = 0.0;
  double type2_hat = 0.0;
  double mean_stat_h0 = 0.0;
  double mean_stat_h1 = 0.0;
  double threshold_mean = 0.0;
  std::uint64_t seed = 0;
  // Trials whose resampled threshold fell below the distribution-free one,
  // out of those where both exist. Not written to CSV.
  int below_dfree = 0;
  int dfree_compared = 0;
};

struct ErrorCurve {
  std::string name;
  std::vector<ErrorRow> rows;
};

// Worker count from KUHT_THREADS (unset or 0 means hardware concurrency).
int worker_count();

// For every n: `trials` runs with data from model_p and as many from
// model_q. Trial i at size index j under hypothesis h uses the stream
// (seed, mix64(mix64(i, j), h)); the result does not depend on scheduling.
ErrorCurve estimate_error_rates(const ExperimentConfig& config);

enum class ExponentAxis { kN, kMPlusN };

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;
  int dropped = 0;  // rows with type2 in {0, 1}
};

// OLS of -log(type2) on the size. Needs 3 rows with 0 < type2 < 1.
ExponentFit fit_exponent(const std::vector<double>& sizes,
                         const std::vector<double>& type2);
ExponentFit fit_exponent(const ErrorCurve& curve, ExponentAxis axis);

struct ExactRow {
  int n;
  double gamma;
  double type1;
  double type2;
};

// Delta-kernel simple test with the distribution-free gamma_n (K = 1),
// evaluated exactly by type enumeration.
std::vector<ExactRow> exact_delta_curve(const FiniteDist& P,
                                        const FiniteDist& Q, double alpha,
                                        const std::vector<int>& n_grid);

struct PresetOptions {
  std::optional<int> trials;
  std::optional<int> replicates;
  std::optional<std::vector<Eigen::Index>> n_grid;
  std::string bandwidth = "median";  // gauss_mixture: median, sweep, or w
  double perturbation = 1.0;         // gauss_mixture mean noise scale
};

struct Preset {
  std::string name;
  std::vector<ExperimentConfig> configs;
  std::map<std::string, double> metadata;
  // Sweep presets plot against the kernel bandwidth instead of n.
  bool bandwidth_axis = false;
  std::vector<double> axis_values;  // bandwidth per config when swept
};

// gauss_vs_laplace, gauss_mixture or finite-demo.
Preset make_preset(std::string_view name, std::uint64_t seed,
                   const PresetOptions& options = {});

// Header n,m,trials,type1_hat,type2_hat,mean_stat_h0,mean_stat_h1,
// threshold_mean,seed; %.17g floats, LF line endings.
void write_csv(const ErrorCurve& curve, std::ostream& out);
std::string format_g17(double v);

}  // namespace kuht

#endif  // KUHT_HARNESS_H_
