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

#include "kuht/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "kuht/error.h"
#include "kuht/ksd.h"
#include "kuht/large_deviations.h"
#include "kuht/mmd.h"
#include "kuht/numeric.h"
#include "parse_util.h"

namespace kuht {
namespace {

// Stream ids reserved for per-size planning and preset construction; trial
// streams come from mix64 of small integers and never collide in practice.
constexpr std::uint64_t kPlanStream = 0x706c616e00000000ULL;
constexpr std::uint64_t kMixtureStream = 0x6d69787475726500ULL;

bool is_two_sample(TestKind k) {
  return k == TestKind::kTwoSampleMmd || k == TestKind::kSupFamily;
}

bool is_ksd(TestKind k) { return k == TestKind::kKsdV || k == TestKind::kKsdU; }

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Sample draw(const TargetModel& model, Eigen::Index n, RngStream stream) {
  return sample(model, n, stream);
}

KernelSpec resolve_kernel(const ExperimentConfig& config, const Sample& X,
                          const Sample* Y, const RngStream& rng) {
  if (config.bandwidth == BandwidthMode::kFixed) return config.kernel;
  switch (config.kind) {
    case TestKind::kSimpleMmd:
      // The bandwidth comes from the model so that it is the same kernel the
      // Monte Carlo threshold was simulated with.
      return KernelSpec::gaussian(
          median_bandwidth(draw(config.model_p, X.n(), rng.child(3))));
    case TestKind::kTwoSampleMmd:
      return KernelSpec::gaussian(median_bandwidth(concat(*Y, X)));
    case TestKind::kKsdV:
    case TestKind::kKsdU:
      return KernelSpec::gaussian(median_bandwidth(X));
    default:
      throw InvalidInput("median bandwidth does not apply to this test");
  }
}

double threshold_for_lr(const TargetModel& P, const TargetModel& Q,
                        Eigen::Index n, double alpha, int B,
                        const RngStream& rng) {
  return mc_threshold(P, n, alpha, B, rng, [&](const Sample& S) {
    return lr_statistic(P, Q, S);
  });
}

void finish(TestReport& r) {
  r.decision = r.statistic > r.threshold ? Decision::kRejectH0
                                         : Decision::kAcceptH0;
}

}  // namespace

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kSimpleMmd:
      return "simple_mmd";
    case TestKind::kTwoSampleMmd:
      return "two_sample_mmd";
    case TestKind::kKsdV:
      return "ksd_v";
    case TestKind::kKsdU:
      return "ksd_u";
    case TestKind::kSupFamily:
      return "sup_family";
    case TestKind::kLrOracle:
      return "lr_oracle";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "simple" || name == "simple_mmd") return TestKind::kSimpleMmd;
  if (name == "two_sample" || name == "two_sample_mmd") {
    return TestKind::kTwoSampleMmd;
  }
  if (name == "ksd_v" || name == "ksd") return TestKind::kKsdV;
  if (name == "ksd_u") return TestKind::kKsdU;
  if (name == "sup_family") return TestKind::kSupFamily;
  if (name == "lr" || name == "lr_oracle") return TestKind::kLrOracle;
  throw InvalidInput("unknown test kind '" + std::string(name) + "'");
}

std::string MRule::to_string() const {
  switch (kind) {
    case Kind::kPow15:
      return "pow15";
    case Kind::kEqual:
      return "equal";
    case Kind::kRatio:
      return "ratio:c=" + detail::format_double(c);
  }
  return "?";
}

MRule parse_m_rule(std::string_view text) {
  MRule r;
  if (text == "pow15") return r;
  if (text == "equal") {
    r.kind = MRule::Kind::kEqual;
    return r;
  }
  if (text.substr(0, 6) == "ratio:") {
    const auto kv = detail::parse_key_values(text.substr(6), "m rule");
    detail::reject_unknown_keys(kv, {"c"}, "m rule");
    r.kind = MRule::Kind::kRatio;
    r.c = detail::parse_double(detail::require_key(kv, "c", "m rule"), "c");
    if (!(r.c > 0.0 && r.c < 1.0)) {
      throw InvalidInput("m rule ratio needs c in (0, 1)");
    }
    return r;
  }
  throw InvalidInput("unknown m rule '" + std::string(text) + "'");
}

Eigen::Index m_rule(Eigen::Index n, const MRule& rule) {
  if (n < 1) throw InvalidInput("m_rule needs n >= 1");
  const double nd = static_cast<double>(n);
  switch (rule.kind) {
    case MRule::Kind::kPow15:
      // The offset keeps perfect powers such as 100^1.5 from rounding up.
      return static_cast<Eigen::Index>(std::ceil(std::pow(nd, 1.5) - 1e-9));
    case MRule::Kind::kEqual:
      return n;
    case MRule::Kind::kRatio:
      if (!(rule.c > 0.0 && rule.c < 1.0)) {
        throw InvalidInput("m rule ratio needs c in (0, 1)");
      }
      return std::max<Eigen::Index>(
          1, static_cast<Eigen::Index>(
                 std::ceil(nd * rule.c / (1.0 - rule.c) - 1e-9)));
  }
  throw InvalidInput("unknown m rule");
}

Statistic statistic_of(const ExperimentConfig& config) {
  switch (config.kind) {
    case TestKind::kSimpleMmd:
      return config.unbiased ? Statistic::kMmdUnbiasedModel
                             : Statistic::kMmdBiasedModel;
    case TestKind::kTwoSampleMmd:
      return config.unbiased ? Statistic::kMmdUnbiasedTwo
                             : Statistic::kMmdBiasedTwo;
    case TestKind::kKsdV:
      return Statistic::kKsdV;
    case TestKind::kKsdU:
      return Statistic::kKsdU;
    case TestKind::kSupFamily:
      return Statistic::kSupFamily;
    case TestKind::kLrOracle:
      return Statistic::kLr;
  }
  throw InvalidInput("unknown test kind");
}

void ExperimentConfig::validate() const {
  check_alpha(alpha);
  if (rule.alpha != alpha) {
    throw InvalidInput("threshold rule alpha differs from the test alpha");
  }
  if (n_grid.empty()) throw InvalidInput("n grid is empty");
  for (auto n : n_grid) {
    if (n < 1) throw InvalidInput("n grid entries must be >= 1");
  }
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  const RuleKind data = rule.data_kind();
  bool ok = false;
  switch (kind) {
    case TestKind::kSimpleMmd:
      ok = data == RuleKind::kDfree || data == RuleKind::kMonteCarlo;
      break;
    case TestKind::kTwoSampleMmd:
    case TestKind::kSupFamily:
      ok = data == RuleKind::kDfree || data == RuleKind::kPermutation;
      break;
    case TestKind::kKsdV:
    case TestKind::kKsdU:
      ok = data == RuleKind::kDfree || data == RuleKind::kWild ||
           data == RuleKind::kMonteCarlo;
      break;
    case TestKind::kLrOracle:
      ok = rule.kind == RuleKind::kMonteCarlo;
      break;
  }
  if (!ok) {
    throw InvalidInput("threshold rule '" + rule.to_string() +
                       "' does not apply to " + std::string(to_string(kind)));
  }
  if ((kind == TestKind::kSupFamily) != kernel.is_family()) {
    throw InvalidInput(kind == TestKind::kSupFamily
                           ? "sup_family needs a kernel family"
                           : "kernel families need the sup_family test");
  }
  if (bandwidth == BandwidthMode::kMedian &&
      (kind == TestKind::kSupFamily || kind == TestKind::kLrOracle)) {
    throw InvalidInput("median bandwidth does not apply to " +
                       std::string(to_string(kind)));
  }
  if (is_ksd(kind) && !model_p.is_continuous()) {
    throw InvalidInput("KSD tests need a continuous model");
  }
}

SizePlan plan_size(const ExperimentConfig& config, Eigen::Index n,
                   const RngStream& rng) {
  SizePlan plan;
  plan.n = n;
  if (is_two_sample(config.kind)) plan.m = m_rule(n, config.m_rule);
  if (config.bandwidth == BandwidthMode::kFixed) {
    plan.kernel = config.kernel;
  } else if (config.kind == TestKind::kSimpleMmd) {
    plan.kernel = KernelSpec::gaussian(
        median_bandwidth(draw(config.model_p, n, rng.child(0))));
  }
  if (config.rule.data_kind() == RuleKind::kMonteCarlo) {
    const RngStream mc = rng.child(1);
    if (config.kind == TestKind::kLrOracle) {
      plan.data_threshold =
          threshold_for_lr(config.model_p, config.model_q, n, config.alpha,
                           config.rule.replicates, mc);
    } else if (plan.kernel) {
      plan.data_threshold =
          mc_threshold(config.model_p, *plan.kernel, statistic_of(config), n,
                       config.alpha, config.rule.replicates, mc);
    }
  }
  return plan;
}

double lr_statistic(const TargetModel& P, const TargetModel& Q,
                    const Sample& X) {
  std::vector<double> terms(static_cast<std::size_t>(X.n()));
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    const double lq = log_density(Q, X.point(i));
    const double lp = log_density(P, X.point(i));
    if (!std::isfinite(lq) || !std::isfinite(lp)) {
      throw SupportViolation("likelihood ratio undefined: a point has zero "
                             "density under one of the models");
    }
    terms[static_cast<std::size_t>(i)] = lq - lp;
  }
  return pairwise_sum(terms) / static_cast<double>(X.n());
}

TestReport lr_oracle(const TargetModel& P, const TargetModel& Q,
                     const Sample& X, double alpha, int B,
                     const RngStream& rng) {
  check_alpha(alpha);
  TestReport r;
  r.statistic_kind = Statistic::kLr;
  r.rule = parse_threshold_rule("mc:B=" + std::to_string(B), alpha);
  r.statistic = lr_statistic(P, Q, X);
  r.threshold = threshold_for_lr(P, Q, X.n(), alpha, B, rng.child(2));
  r.data_threshold = r.threshold;
  r.master_seed = rng.master_seed();
  r.stream_id = rng.stream_id();
  finish(r);
  return r;
}

TestReport run_test(const ExperimentConfig& config, const Sample& X,
                    const Sample* Y, const RngStream& rng,
                    const SizePlan* plan) {
  config.validate();
  if (plan && plan->n != X.n()) {
    throw InvalidInput("size plan does not match the sample size");
  }
  if (is_two_sample(config.kind) && Y == nullptr) {
    throw InvalidInput(std::string(to_string(config.kind)) +
                       " needs a model sample");
  }
  if (!is_two_sample(config.kind) && Y != nullptr) {
    throw InvalidInput(std::string(to_string(config.kind)) +
                       " takes a single sample");
  }
  const double alpha = config.alpha;
  const int B = config.rule.replicates;
  const Statistic stat = statistic_of(config);
  const RngStream resample = rng.child(2);

  TestReport r;
  r.statistic_kind = stat;
  r.rule = config.rule;
  r.master_seed = rng.master_seed();
  r.stream_id = rng.stream_id();

  if (config.kind == TestKind::kLrOracle) {
    r.statistic = lr_statistic(config.model_p, config.model_q, X);
    r.data_threshold =
        plan && plan->data_threshold
            ? *plan->data_threshold
            : threshold_for_lr(config.model_p, config.model_q, X.n(), alpha,
                               B, resample);
    r.threshold = *r.data_threshold;
    finish(r);
    return r;
  }

  const KernelSpec kernel = plan && plan->kernel
                                ? *plan->kernel
                                : resolve_kernel(config, X, Y, rng);
  r.kernel = kernel.to_string();
  const Eigen::Index n = X.n();
  std::optional<Eigen::Index> m;
  if (Y) m = Y->n();

  std::optional<double> stein_bound;
  Eigen::MatrixXd H;
  std::optional<SteinContext> ctx;
  switch (config.kind) {
    case TestKind::kSimpleMmd:
      r.statistic = config.unbiased
                        ? mmd2_unbiased_model(config.model_p, kernel, X).value
                        : mmd2_biased_model(config.model_p, kernel, X).value;
      break;
    case TestKind::kTwoSampleMmd:
      r.statistic = config.unbiased ? mmd2_unbiased_two(kernel, *Y, X).value
                                    : mmd2_biased_two(kernel, *Y, X).value;
      break;
    case TestKind::kSupFamily:
      r.statistic = sup_family(kernel, *Y, X);
      break;
    case TestKind::kKsdV:
    case TestKind::kKsdU:
      ctx.emplace(config.model_p, kernel);
      H = stein_matrix(*ctx, X);
      stein_bound = H.diagonal().maxCoeff();
      r.statistic = config.kind == TestKind::kKsdV ? ksd2_vstat(H)
                                                   : ksd2_ustat(H);
      r.warnings = ksd_warnings(*ctx, X.d());
      break;
    case TestKind::kLrOracle:
      break;
  }

  r.dfree_threshold =
      dfree_threshold_for(stat, kernel.bound(), n, m, alpha, stein_bound);

  switch (config.rule.data_kind()) {
    case RuleKind::kDfree:
    case RuleKind::kMinCombo:
      break;
    case RuleKind::kMonteCarlo:
      r.data_threshold =
          plan && plan->data_threshold
              ? *plan->data_threshold
              : mc_threshold(config.model_p, kernel, stat, n, alpha, B,
                             resample);
      break;
    case RuleKind::kPermutation:
      r.data_threshold =
          permutation_threshold(kernel, *Y, X, stat, alpha, B, resample);
      break;
    case RuleKind::kWild:
      r.data_threshold = wild_threshold(H, stat, alpha, B, resample);
      break;
  }

  switch (config.rule.kind) {
    case RuleKind::kDfree:
      r.threshold = *r.dfree_threshold;
      break;
    case RuleKind::kMinCombo:
      r.threshold = combine_min(*r.data_threshold, *r.dfree_threshold);
      break;
    default:
      r.threshold = *r.data_threshold;
      break;
  }
  finish(r);
  return r;
}

int worker_count() {
  const char* env = std::getenv("KUHT_THREADS");
  long long requested = 0;
  if (env != nullptr && *env != '\0') {
    requested = detail::parse_int(env, "KUHT_THREADS");
    if (requested < 0) throw InvalidInput("KUHT_THREADS must be >= 0");
  }
  if (requested == 0) {
    requested = std::max(1u, std::thread::hardware_concurrency());
  }
  return static_cast<int>(std::min<long long>(requested, 256));
}

ErrorCurve estimate_error_rates(const ExperimentConfig& config) {
  config.validate();
  struct Outcome {
    bool reject = false;
    double statistic = 0.0;
    double threshold = 0.0;
    std::optional<double> data;
    std::optional<double> dfree;
  };
  ErrorCurve curve;
  curve.name = config.name;
  const auto trials = static_cast<std::size_t>(config.trials);
  for (std::size_t j = 0; j < config.n_grid.size(); ++j) {
    const Eigen::Index n = config.n_grid[j];
    const SizePlan plan =
        plan_size(config, n, RngStream(config.seed, mix64(kPlanStream, j)));
    std::vector<Outcome> out(2 * trials);
    parallel_for(out.size(), [&](std::size_t task) {
      const std::uint64_t i = task / 2;
      const std::uint64_t h = task % 2;
      const RngStream rng(config.seed, mix64(mix64(i, j), h));
      const TargetModel& source = h == 0 ? config.model_p : config.model_q;
      const Sample X = draw(source, n, rng.child(0));
      std::optional<Sample> Y;
      if (plan.m) Y = draw(config.model_p, *plan.m, rng.child(1));
      const TestReport rep =
          run_test(config, X, Y ? &*Y : nullptr, rng, &plan);
      out[task] = {rep.rejects(), rep.statistic, rep.threshold,
                   rep.data_threshold, rep.dfree_threshold};
    });

    ErrorRow row;
    row.n = n;
    row.m = plan.m;
    row.trials = config.trials;
    row.seed = config.seed;
    int rejects_h0 = 0, accepts_h1 = 0;
    KahanSum s0, s1, th;
    for (std::size_t task = 0; task < out.size(); ++task) {
      const Outcome& o = out[task];
      if (task % 2 == 0) {
        rejects_h0 += o.reject ? 1 : 0;
        s0.add(o.statistic);
      } else {
        accepts_h1 += o.reject ? 0 : 1;
        s1.add(o.statistic);
      }
      th.add(o.threshold);
      if (o.data && o.dfree) {
        ++row.dfree_compared;
        row.below_dfree += *o.data < *o.dfree ? 1 : 0;
      }
    }
    const double t = static_cast<double>(config.trials);
    row.type1_hat = rejects_h0 / t;
    row.type2_hat = accepts_h1 / t;
    row.mean_stat_h0 = s0.value() / t;
    row.mean_stat_h1 = s1.value() / t;
    row.threshold_mean = th.value() / (2.0 * t);
    curve.rows.push_back(row);
  }
  return curve;
}

ExponentFit fit_exponent(const std::vector<double>& sizes,
                         const std::vector<double>& type2) {
  if (sizes.size() != type2.size()) {
    throw InvalidInput("fit_exponent: sizes and rates differ in length");
  }
  ExponentFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (type2[i] > 0.0 && type2[i] < 1.0) {
      x.push_back(sizes[i]);
      y.push_back(-std::log(type2[i]));
    } else {
      ++fit.dropped;
    }
  }
  fit.used = static_cast<int>(x.size());
  if (fit.used < 3) {
    throw InvalidInput("fit_exponent needs at least 3 rows with 0 < type2 < 1, "
                       "got " + std::to_string(fit.used));
  }
  const double k = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / k;
  const double my = pairwise_sum(y) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("fit_exponent needs distinct sizes");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += e * e;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
  return fit;
}

ExponentFit fit_exponent(const ErrorCurve& curve, ExponentAxis axis) {
  std::vector<double> sizes, type2;
  for (const auto& row : curve.rows) {
    double size = static_cast<double>(row.n);
    if (axis == ExponentAxis::kMPlusN) {
      if (!row.m) throw InvalidInput("m_plus_n axis needs two-sample rows");
      size += static_cast<double>(*row.m);
    }
    sizes.push_back(size);
    type2.push_back(row.type2_hat);
  }
  return fit_exponent(sizes, type2);
}

std::vector<ExactRow> exact_delta_curve(const FiniteDist& P,
                                        const FiniteDist& Q, double alpha,
                                        const std::vector<int>& n_grid) {
  std::vector<ExactRow> rows;
  for (int n : n_grid) {
    const double gamma =
        dfree_threshold(DfreeKind::kSimple, 1.0, n, std::nullopt, alpha);
    const ExactErrors e = exact_error_probs(P, Q, gamma, n);
    rows.push_back({n, gamma, e.type1, e.type2});
  }
  return rows;
}

Preset make_preset(std::string_view name, std::uint64_t seed,
                   const PresetOptions& options) {
  Preset preset;
  preset.name = std::string(name);
  const int B = options.replicates.value_or(500);
  auto base = [&](std::string cname, TestKind kind, std::string rule,
                  double alpha) {
    ExperimentConfig c;
    c.name = std::move(cname);
    c.kind = kind;
    c.alpha = alpha;
    c.rule = parse_threshold_rule(rule + ":B=" + std::to_string(B), alpha);
    c.seed = seed;
    c.trials = options.trials.value_or(500);
    return c;
  };

  if (name == "gauss_vs_laplace") {
    const auto P = TargetModel::gaussian_1d(0.0, 8.0);
    const auto Q = TargetModel::laplace(0.0, 2.0);
    preset.metadata["kld"] = kld(P, Q);
    const std::vector<Eigen::Index> grid =
        options.n_grid.value_or(std::vector<Eigen::Index>{25, 50, 100, 200, 400});
    std::vector<ExperimentConfig> cs = {
        base("simple_mmd", TestKind::kSimpleMmd, "mc", 0.1),
        base("two_sample_mmd", TestKind::kTwoSampleMmd, "perm", 0.1),
        base("ksd_v", TestKind::kKsdV, "wild", 0.1),
        base("lr_oracle", TestKind::kLrOracle, "mc", 0.1),
    };
    for (auto& c : cs) {
      c.model_p = P;
      c.model_q = Q;
      c.kernel = KernelSpec::gaussian(1.0);
      c.n_grid = grid;
    }
    preset.configs = std::move(cs);
  } else if (name == "gauss_mixture") {
    RngStream rng(seed, kMixtureStream);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> mu_q(5), mu_p(5);
    for (auto& v : mu_q) v = unif(rng.engine());
    for (std::size_t k = 0; k < 5; ++k) {
      mu_p[k] = mu_q[k] + options.perturbation * noise(rng.engine());
    }
    const std::vector<double> w(5, 0.2);
    const auto P = TargetModel::mixture_1d(w, mu_p, 1.0);
    const auto Q = TargetModel::mixture_1d(w, mu_q, 1.0);
    for (std::size_t k = 0; k < 5; ++k) {
      preset.metadata["mu_q" + std::to_string(k)] = mu_q[k];
      preset.metadata["mu_p" + std::to_string(k)] = mu_p[k];
    }
    preset.metadata["perturbation"] = options.perturbation;
    auto trio = [&](const std::string& suffix) {
      return std::vector<ExperimentConfig>{
          base("simple_mmd" + suffix, TestKind::kSimpleMmd, "mc", 0.1),
          base("two_sample_mmd" + suffix, TestKind::kTwoSampleMmd, "perm", 0.1),
          base("ksd_v" + suffix, TestKind::kKsdV, "wild", 0.1),
      };
    };
    std::vector<ExperimentConfig> cs;
    if (options.bandwidth == "median") {
      cs = trio("");
      for (auto& c : cs) c.bandwidth = BandwidthMode::kMedian;
      auto fixed = base("simple_mmd_w1", TestKind::kSimpleMmd, "mc", 0.1);
      fixed.kernel = KernelSpec::gaussian(1.0);
      cs.push_back(fixed);
      for (auto& c : cs) {
        c.n_grid = options.n_grid.value_or(
            std::vector<Eigen::Index>{25, 50, 100, 200});
      }
    } else if (options.bandwidth == "sweep") {
      preset.bandwidth_axis = true;
      for (double bw : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
        for (auto c : trio("_w" + detail::format_double(bw))) {
          c.kernel = KernelSpec::gaussian(bw);
          c.n_grid = options.n_grid.value_or(std::vector<Eigen::Index>{50});
          cs.push_back(c);
          preset.axis_values.push_back(bw);
        }
      }
    } else {
      const double bw = detail::parse_double(options.bandwidth, "bandwidth");
      cs = trio("");
      for (auto& c : cs) {
        c.kernel = KernelSpec::gaussian(bw);
        c.n_grid = options.n_grid.value_or(
            std::vector<Eigen::Index>{25, 50, 100, 200});
      }
    }
    for (auto& c : cs) {
      c.model_p = P;
      c.model_q = Q;
    }
    preset.configs = std::move(cs);
  } else if (name == "finite-demo") {
    const FiniteDist p({0.5, 0.5});
    const FiniteDist q({0.9, 0.1});
    preset.metadata["kl_pq"] = kl_divergence(p.probs(), q.probs());
    auto lr = base("lr_oracle", TestKind::kLrOracle, "mc", 0.1);
    lr.trials = options.trials.value_or(2000);
    lr.n_grid = options.n_grid.value_or(
        std::vector<Eigen::Index>{4, 6, 8, 10, 12, 14, 16, 18});
    auto simple = base("simple_mmd", TestKind::kSimpleMmd, "mc", 0.1);
    simple.rule = parse_threshold_rule("dfree", 0.1);
    simple.trials = options.trials.value_or(2000);
    simple.n_grid = options.n_grid.value_or(
        std::vector<Eigen::Index>{20, 30, 40, 50, 60});
    for (auto* c : {&lr, &simple}) {
      c->model_p = TargetModel::finite(p);
      c->model_q = TargetModel::finite(q);
      c->kernel = KernelSpec::delta(2);
    }
    preset.configs = {lr, simple};
  } else {
    throw InvalidInput("unknown preset '" + std::string(name) + "'");
  }
  for (const auto& c : preset.configs) c.validate();
  return preset;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const ErrorCurve& curve, std::ostream& out) {
  out << "n,m,trials,type1_hat,type2_hat,mean_stat_h0,mean_stat_h1,"
         "threshold_mean,seed\n";
  for (const auto& r : curve.rows) {
    out << r.n << ',';
    if (r.m) out << *r.m;
    out << ',' << r.trials << ',' << format_g17(r.type1_hat) << ','
        << format_g17(r.type2_hat) << ',' << format_g17(r.mean_stat_h0) << ','
        << format_g17(r.mean_stat_h1) << ',' << format_g17(r.threshold_mean)
        << ',' << r.seed << '\n';
  }
}

}  // namespace kuht
