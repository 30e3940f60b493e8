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

#include "kuht/cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kuht/large_deviations.h"
#include "kuht/svg.h"
#include "parse_util.h"

namespace kuht {
namespace {

using detail::format_double;

// Re-throws descriptor errors as usage errors that name the flag.
template <typename F>
auto flag(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(name + ": " + e.what());
  }
}

struct RawOptions {
  std::string kind;
  std::string model;
  std::string alt_model;
  std::string data_model;
  std::string kernel = "gaussian:w=1";
  std::string threshold = "dfree";
  std::string m_rule = "pow15";
  std::string n;
  std::string name = "custom";
  double alpha = 0.1;
  long long m = 0;
  int trials = 0;
  int replicates = 0;
  bool unbiased = false;
};

void add_test_options(CLI::App* app, RawOptions& o, bool with_grid) {
  app->add_option("--kind", o.kind,
                  "simple, two_sample, ksd_v, ksd_u, sup_family or lr");
  app->add_option("--model", o.model, "null model, e.g. gauss:mu=0,sigma2=1");
  app->add_option("--alt-model", o.alt_model,
                  "alternative model; required for lr");
  app->add_option("--kernel", o.kernel,
                  "gaussian:w=1, imq:c=1,eta=-0.5, delta:t=2, "
                  "family:gaussian:w=0.5;1;2, or median");
  app->add_option("--alpha", o.alpha, "test level in (0, 1)");
  app->add_option("--threshold", o.threshold,
                  "dfree, mc:B=500, perm:B=500, wild:B=500 or min:<rule>");
  app->add_option("--m-rule", o.m_rule, "pow15, equal or ratio:c=0.5");
  app->add_flag("--unbiased", o.unbiased, "U-statistic MMD estimate");
  app->add_option("--n", o.n, with_grid ? "comma-separated sample sizes"
                                        : "sample size");
}

ExperimentConfig build_config(const RawOptions& o, bool grid) {
  if (o.kind.empty()) throw UsageError("--kind is required");
  if (o.model.empty()) throw UsageError("--model is required");
  ExperimentConfig c;
  c.name = o.name;
  c.kind = flag("--kind", [&] { return parse_test_kind(o.kind); });
  flag("--alpha", [&] {
    check_alpha(o.alpha);
    return 0;
  });
  c.alpha = o.alpha;
  c.model_p = flag("--model", [&] { return parse_model(o.model); });
  c.model_q = c.model_p;
  if (!o.alt_model.empty()) {
    c.model_q = flag("--alt-model", [&] { return parse_model(o.alt_model); });
  } else if (c.kind == TestKind::kLrOracle) {
    throw UsageError("--alt-model is required for lr");
  }
  if (o.kernel == "median") {
    c.bandwidth = BandwidthMode::kMedian;
  } else {
    c.kernel = flag("--kernel", [&] { return parse_kernel(o.kernel); });
  }
  c.rule = flag("--threshold",
                [&] { return parse_threshold_rule(o.threshold, o.alpha); });
  c.m_rule = flag("--m-rule", [&] { return parse_m_rule(o.m_rule); });
  c.unbiased = o.unbiased;
  if (!o.n.empty()) {
    c.n_grid.clear();
    for (auto part : detail::split(o.n, ',')) {
      c.n_grid.push_back(static_cast<Eigen::Index>(
          flag("--n", [&] { return detail::parse_int(part, "n"); })));
    }
    if (!grid && c.n_grid.size() != 1) {
      throw UsageError("--n: expected a single sample size");
    }
  }
  if (o.trials != 0) c.trials = o.trials;
  flag("--kind", [&] {
    c.validate();
    return 0;
  });
  return c;
}

FiniteDist parse_finite(const std::string& name, const std::string& text) {
  return flag(name, [&] {
    return FiniteDist(detail::parse_list(text, ';', "probabilities"));
  });
}

std::string write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
  return path;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

nlohmann::json num(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : " ") + p;
  return s;
}

Sample sample_or_read(const CliConfig& c, Eigen::Index n, RngStream rng) {
  if (c.data_path) return read_sample(*c.data_path);
  return sample(*c.data_model, n, rng);
}

int run_test_like(const CliConfig& c, std::ostream& out, std::ostream& err,
                  bool calibrate) {
  ExperimentConfig cfg = *c.experiment;
  const RngStream rng(c.seed, 0);
  const Eigen::Index n = cfg.n_grid.front();
  const Sample X = sample_or_read(c, n, rng.child(0));
  cfg.n_grid = {X.n()};
  std::optional<Sample> Y;
  const bool two = cfg.kind == TestKind::kTwoSampleMmd ||
                   cfg.kind == TestKind::kSupFamily;
  if (two) {
    if (c.data_y_path) {
      Y = read_sample(*c.data_y_path);
    } else {
      const Eigen::Index m = c.m ? *c.m : m_rule(X.n(), cfg.m_rule);
      RngStream ry = rng.child(1);
      Y = sample(cfg.model_p, m, ry);
    }
  }
  const TestReport r = run_test(cfg, X, Y ? &*Y : nullptr, rng);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  if (!c.out.empty()) {
    nlohmann::json j;
    j["statistic_kind"] = std::string(traits(r.statistic_kind).name);
    j["statistic"] = num(r.statistic);
    j["threshold"] = num(r.threshold);
    j["rule"] = r.rule.to_string();
    j["decision"] = r.rejects() ? "reject_H0" : "accept_H0";
    j["dfree_threshold"] =
        r.dfree_threshold ? num(*r.dfree_threshold) : nlohmann::json(nullptr);
    j["data_threshold"] =
        r.data_threshold ? num(*r.data_threshold) : nlohmann::json(nullptr);
    j["kernel"] = r.kernel;
    j["warnings"] = r.warnings;
    j["seed"] = r.master_seed;
    j["stream"] = r.stream_id;
    write_text(c.out, j.dump(2) + "\n");
  }
  std::ostringstream line;
  if (calibrate) {
    line << "threshold=" << format_double(r.threshold);
    if (r.dfree_threshold) {
      line << " dfree=" << format_double(*r.dfree_threshold);
    }
    if (r.data_threshold) {
      line << " data=" << format_double(*r.data_threshold);
    }
    line << " rule=" << r.rule.to_string() << " n=" << X.n();
  } else {
    line << "decision=" << (r.rejects() ? "reject_H0" : "accept_H0")
         << " statistic=" << format_double(r.statistic)
         << " threshold=" << format_double(r.threshold)
         << " rule=" << r.rule.to_string();
  }
  if (!r.kernel.empty()) line << " kernel=" << r.kernel;
  out << line.str() << '\n';
  return 0;
}

int run_experiment(const CliConfig& c, std::ostream& out) {
  Preset preset;
  if (!c.preset.empty()) {
    preset = make_preset(c.preset, c.seed, c.preset_options);
  } else {
    preset.name = c.experiment->name;
    preset.configs = {*c.experiment};
  }
  std::vector<ErrorCurve> curves;
  for (const auto& cfg : preset.configs) {
    curves.push_back(estimate_error_rates(cfg));
  }
  const auto paths = write_experiment(preset, curves, c.out);
  out << "wrote " << join(paths) << '\n';
  return 0;
}

int run_sanov(const CliConfig& c, std::ostream& out) {
  nlohmann::json j;
  j["p"] = std::vector<double>(c.p->probs().begin(), c.p->probs().end());
  j["q"] = std::vector<double>(c.q->probs().begin(), c.q->probs().end());
  j["gamma"] = c.gamma;
  bool holds = true;
  std::vector<SanovReport> reports;
  for (int n : c.n_list) {
    const SanovReport r = sanov_sandwich_check(*c.p, *c.q, c.gamma, n);
    reports.push_back(r);
    holds = holds && r.holds();
    j["sanov"].push_back({{"n", r.n},
                          {"rate", num(r.rate)},
                          {"i_min", num(r.i_min)},
                          {"i_type", num(r.i_type)},
                          {"type_slack", r.type_slack},
                          {"grid_slack", r.grid_slack},
                          {"grid_resolution", r.grid_resolution},
                          {"vacuous", r.vacuous},
                          {"holds", r.holds()},
                          {"lower_ok", r.lower_ok},
                          {"upper_ok", r.upper_ok}});
  }
  if (!reports.empty()) {
    j["rates_nonincreasing"] = rates_nonincreasing(reports);
  }
  for (const auto& [m, n] : c.pairs) {
    const ExtendedSanovReport r =
        extended_sanov_check(*c.p, *c.q, c.gamma, m, n);
    holds = holds && r.holds();
    j["extended"].push_back({{"m", r.m},
                             {"n", r.n},
                             {"c", r.c},
                             {"rate", num(r.rate)},
                             {"j_min", num(r.j_min)},
                             {"j_type", num(r.j_type)},
                             {"type_slack", r.type_slack},
                             {"grid_slack", r.grid_slack},
                             {"grid_resolution", r.grid_resolution},
                             {"vacuous", r.vacuous},
                             {"holds", r.holds()},
                             {"lower_ok", r.lower_ok},
                             {"upper_ok", r.upper_ok}});
  }
  j["holds"] = holds;
  ensure_dir(c.out);
  const std::string path =
      (std::filesystem::path(c.out) / "sanov_report.json").string();
  write_text(path, j.dump(2) + "\n");
  out << "wrote " << path << " holds=" << (holds ? "true" : "false") << '\n';
  return 0;
}

int run_exponent(const CliConfig& c, std::ostream& out) {
  const Preset preset = make_preset(c.preset, c.seed, c.preset_options);
  const FiniteDist p({0.5, 0.5});
  const FiniteDist q({0.9, 0.1});
  std::vector<int> grid;
  const ExperimentConfig* lr = nullptr;
  for (const auto& cfg : preset.configs) {
    if (cfg.kind == TestKind::kLrOracle) lr = &cfg;
    if (cfg.kind == TestKind::kSimpleMmd) {
      for (auto n : cfg.n_grid) grid.push_back(static_cast<int>(n));
    }
  }
  if (lr == nullptr || grid.empty()) {
    throw InvalidInput("preset '" + c.preset + "' has no exponent setup");
  }
  const auto exact = exact_delta_curve(p, q, lr->alpha, grid);
  std::vector<double> sizes, type2;
  for (const auto& r : exact) {
    sizes.push_back(r.n);
    type2.push_back(r.type2);
  }
  const ExponentFit fe = fit_exponent(sizes, type2);
  const ErrorCurve curve = estimate_error_rates(*lr);
  const ExponentFit fl = fit_exponent(curve, ExponentAxis::kN);
  std::string extra;
  if (!c.out.empty()) {
    ensure_dir(c.out);
    const std::string path =
        (std::filesystem::path(c.out) / (c.preset + "_lr_oracle.csv"))
            .string();
    std::ostringstream csv;
    write_csv(curve, csv);
    extra = " wrote " + write_text(path, csv.str());
  }
  char ref[32];
  std::snprintf(ref, sizeof(ref), "%.6f", preset.metadata.at("kl_pq"));
  out << "slope_lr=" << format_double(fl.slope)
      << " r2_lr=" << format_double(fl.r2) << " dropped_lr=" << fl.dropped
      << " slope_exact=" << format_double(fe.slope)
      << " reference_kl=" << ref << extra << '\n';
  return 0;
}

}  // namespace

Sample read_sample(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(detail::parse_list(line, ',', "data row"));
    if (rows.back().size() != rows.front().size()) {
      throw InvalidInput(path + ": rows have different dimensions");
    }
  }
  if (rows.empty()) throw InvalidInput(path + ": no data rows");
  RowMatrix data(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          rows[i][k];
    }
  }
  return Sample(std::move(data));
}

std::vector<std::string> write_experiment(const Preset& preset,
                                          const std::vector<ErrorCurve>& curves,
                                          const std::string& dir) {
  ensure_dir(dir);
  std::vector<std::string> paths;
  for (const auto& curve : curves) {
    std::ostringstream csv;
    write_csv(curve, csv);
    paths.push_back(write_text(
        (std::filesystem::path(dir) / (preset.name + "_" + curve.name + ".csv"))
            .string(),
        csv.str()));
  }
  const std::vector<double>* xs =
      preset.bandwidth_axis ? &preset.axis_values : nullptr;
  const bool plottable = preset.bandwidth_axis || curves.front().rows.size() >= 2;
  if (plottable) {
    for (bool type2 : {true, false}) {
      PlotSpec spec;
      spec.title = preset.name + (type2 ? " type-II error" : " type-I error");
      spec.x_label = preset.bandwidth_axis ? "bandwidth w" : "n";
      spec.y_label = type2 ? "type-II error" : "type-I error";
      spec.y_range = std::make_pair(0.0, 1.0);
      const std::string path =
          (std::filesystem::path(dir) /
           (preset.name + (type2 ? "_type2.svg" : "_type1.svg")))
              .string();
      emit_svg(curves_to_series(curves, type2, xs), spec, path);
      paths.push_back(path);
    }
  }
  return paths;
}

CliConfig parse_args(const std::vector<std::string>& argv) {
  CLI::App app{"Kernel and Stein discrepancy hypothesis tests", "kuht"};
  app.require_subcommand(1);
  CliConfig c;
  RawOptions o;
  std::string data, data_y, out, p, q, n_list, pairs, preset, bandwidth;
  std::string n_grid;
  double perturbation = 1.0;
  std::uint64_t seed = 42;

  auto* test = app.add_subcommand("test", "run one test on one sample");
  auto* calibrate =
      app.add_subcommand("calibrate", "compute the threshold for one sample");
  for (auto* sub : {test, calibrate}) {
    add_test_options(sub, o, false);
    sub->add_option("--data-model", o.data_model,
                    "model generating X (defaults to --model)");
    sub->add_option("--data", data, "file with one point per line");
    sub->add_option("--data-y", data_y, "model sample for two-sample tests");
    sub->add_option("--m", o.m, "model sample size for two-sample tests");
    sub->add_option("--out", out, "write a JSON report here");
    sub->add_option("--seed", seed, "master seed");
  }

  auto* experiment =
      app.add_subcommand("experiment", "estimate error curves");
  add_test_options(experiment, o, true);
  experiment->add_option("--preset", preset,
                         "gauss_vs_laplace or gauss_mixture");
  experiment->add_option("--name", o.name, "series name");
  experiment->add_option("--trials", o.trials, "trials per hypothesis");
  experiment->add_option("--replicates", o.replicates,
                         "bootstrap replicates (presets)");
  experiment->add_option("--bandwidth", bandwidth,
                         "gauss_mixture: median, sweep or a fixed w");
  experiment->add_option("--perturbation", perturbation,
                         "gauss_mixture: mean perturbation scale");
  experiment->add_option("--out", out, "output directory");
  experiment->add_option("--seed", seed, "master seed");

  auto* sanov = app.add_subcommand("sanov", "finite-n Sanov checks");
  sanov->add_option("--p", p, "null distribution, e.g. .5;.5")->required();
  sanov->add_option("--q", q, "sampling distribution")->required();
  sanov->add_option("--gamma", c.gamma, "ball radius")->required();
  sanov->add_option("--n", n_list, "comma-separated sample sizes");
  sanov->add_option("--pair", pairs, "extended check sizes, e.g. 20:20");
  sanov->add_option("--out", out, "output directory");
  sanov->add_option("--seed", seed, "master seed (unused)");

  auto* exponent = app.add_subcommand("exponent", "type-II exponent fits");
  exponent->add_option("--preset", preset, "finite-demo")->required();
  exponent->add_option("--trials", o.trials, "trials per hypothesis");
  exponent->add_option("--out", out, "optional output directory");
  exponent->add_option("--seed", seed, "master seed");

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : app.get_subcommands()) throw HelpRequest(sub->help());
    throw HelpRequest(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  c.seed = seed;
  c.out = out;

  if (test->parsed() || calibrate->parsed()) {
    c.subcommand = test->parsed() ? Subcommand::kTest : Subcommand::kCalibrate;
    if (o.n.empty() && data.empty()) {
      throw UsageError("--n is required unless --data is given");
    }
    if (o.n.empty()) o.n = "1";
    c.experiment = build_config(o, false);
    c.data_model = c.experiment->model_p;
    if (!o.data_model.empty()) {
      c.data_model =
          flag("--data-model", [&] { return parse_model(o.data_model); });
    }
    if (!data.empty()) c.data_path = data;
    if (!data_y.empty()) c.data_y_path = data_y;
    if (o.m != 0) {
      if (o.m < 1) throw UsageError("--m: must be >= 1");
      c.m = static_cast<Eigen::Index>(o.m);
    }
  } else if (experiment->parsed()) {
    c.subcommand = Subcommand::kExperiment;
    if (c.out.empty()) c.out = "results";
    if (!preset.empty()) {
      if (!o.kind.empty() || !o.model.empty() || !o.alt_model.empty()) {
        throw UsageError("--preset: cannot be combined with --kind, --model "
                         "or --alt-model");
      }
      c.preset = preset;
      auto& po = c.preset_options;
      if (o.trials != 0) {
        if (o.trials < 1) throw UsageError("--trials: must be >= 1");
        po.trials = o.trials;
      }
      if (o.replicates != 0) po.replicates = o.replicates;
      if (!o.n.empty()) {
        std::vector<Eigen::Index> grid;
        for (auto part : detail::split(o.n, ',')) {
          grid.push_back(static_cast<Eigen::Index>(
              flag("--n", [&] { return detail::parse_int(part, "n"); })));
        }
        po.n_grid = grid;
      }
      if (!bandwidth.empty()) po.bandwidth = bandwidth;
      po.perturbation = perturbation;
      flag("--preset", [&] {
        make_preset(preset, seed, po);
        return 0;
      });
    } else {
      if (o.trials < 0) throw UsageError("--trials: must be >= 1");
      c.experiment = build_config(o, true);
      c.experiment->seed = seed;
    }
  } else if (sanov->parsed()) {
    c.subcommand = Subcommand::kSanov;
    if (c.out.empty()) c.out = "results";
    c.p = parse_finite("--p", p);
    c.q = parse_finite("--q", q);
    if (c.p->size() != c.q->size()) {
      throw UsageError("--q: alphabet size differs from --p");
    }
    if (!(c.gamma >= 0.0)) throw UsageError("--gamma: must be >= 0");
    if (!n_list.empty()) {
      for (auto part : detail::split(n_list, ',')) {
        const long long n =
            flag("--n", [&] { return detail::parse_int(part, "n"); });
        if (n < 1) throw UsageError("--n: sizes must be >= 1");
        c.n_list.push_back(static_cast<int>(n));
      }
    }
    if (!pairs.empty()) {
      for (auto part : detail::split(pairs, ',')) {
        const auto mn = detail::split(part, ':');
        if (mn.size() != 2) throw UsageError("--pair: expected m:n");
        const long long m =
            flag("--pair", [&] { return detail::parse_int(mn[0], "m"); });
        const long long n =
            flag("--pair", [&] { return detail::parse_int(mn[1], "n"); });
        if (m < 1 || n < 1) throw UsageError("--pair: sizes must be >= 1");
        c.pairs.emplace_back(static_cast<int>(m), static_cast<int>(n));
      }
    }
    if (c.n_list.empty() && c.pairs.empty()) {
      throw UsageError("--n or --pair is required");
    }
  } else {
    c.subcommand = Subcommand::kExponent;
    c.preset = preset;
    if (o.trials < 0) throw UsageError("--trials: must be >= 1");
    if (o.trials > 0) c.preset_options.trials = o.trials;
    flag("--preset", [&] {
      make_preset(preset, seed, c.preset_options);
      return 0;
    });
    if (preset != "finite-demo") {
      throw UsageError("--preset: exponent supports finite-demo only");
    }
  }
  return c;
}

int run_cli(const CliConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.subcommand) {
    case Subcommand::kTest:
      return run_test_like(c, out, err, false);
    case Subcommand::kCalibrate:
      return run_test_like(c, out, err, true);
    case Subcommand::kExperiment:
      return run_experiment(c, out);
    case Subcommand::kSanov:
      return run_sanov(c, out);
    case Subcommand::kExponent:
      return run_exponent(c, out);
  }
  return 2;
}

int cli_main(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err) {
  CliConfig config;
  try {
    config = parse_args(argv);
  } catch (const HelpRequest& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }
  try {
    return run_cli(config, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace kuht
