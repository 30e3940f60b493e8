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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. argv[1] is the kuht CLI binary.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "kuht/calibration.h"
#include "kuht/harness.h"
#include "kuht/ksd.h"
#include "kuht/large_deviations.h"
#include "kuht/mmd.h"
#include "test_util.h"

namespace {

using namespace kuht;
namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 42;
constexpr double kAlpha = 0.1;
constexpr double kLevelLow = 0.05;
constexpr double kLevelHigh = 0.16;
constexpr double kKlDemo = 0.510826;
constexpr double kSlopeSlack = 0.02;
constexpr double kLrSlopeRel = 0.30;
constexpr double kDstarRef = 0.111572;
constexpr double kDstarTol = 1e-3;
constexpr double kFdTol = 1e-5;
constexpr double kSteinTol = 1e-5;
constexpr double kPopMmd = 0.177273;
constexpr double kLrSlack = 0.05;
constexpr double kBelowDfree = 0.95;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

FiniteDist random_dist(std::mt19937_64& g, int t, double floor = 0.0) {
  std::gamma_distribution<double> ga(1.0, 1.0);
  std::vector<double> p(t);
  double s = 0.0;
  for (auto& v : p) s += (v = ga(g) + floor);
  double rest = 1.0;
  for (int i = 0; i + 1 < t; ++i) rest -= (p[i] /= s);
  p[t - 1] = rest;
  return FiniteDist(p);
}

ExperimentConfig null_config(TestKind kind, const char* rule, Eigen::Index n,
                             int trials) {
  ExperimentConfig c;
  c.name = std::string(to_string(kind));
  c.kind = kind;
  c.rule = parse_threshold_rule(rule, kAlpha);
  c.alpha = kAlpha;
  c.n_grid = {n};
  c.m_rule = parse_m_rule("equal");
  c.trials = trials;
  c.seed = kSeed;
  return c;
}

Outcome level_guarantee() {
  auto c = null_config(TestKind::kSimpleMmd, "dfree", 50, 500);
  c.n_grid = {50, 200};
  const auto curve = estimate_error_rates(c);
  bool ok = true;
  std::string d;
  for (const auto& r : curve.rows) {
    ok = ok && r.type1_hat <= kAlpha;
    d += "type1(n=" + std::to_string(r.n) + ")=" + fmt("%.3f", r.type1_hat) +
         " ";
  }
  return {ok, d};
}

Outcome calibrated_levels() {
  const double perm = estimate_error_rates(
                          null_config(TestKind::kTwoSampleMmd, "perm:B=200",
                                      100, 300))
                          .rows[0]
                          .type1_hat;
  const double wild =
      estimate_error_rates(null_config(TestKind::kKsdV, "wild:B=500", 100, 300))
          .rows[0]
          .type1_hat;
  auto in = [](double r) { return r >= kLevelLow && r <= kLevelHigh; };
  return {in(perm) && in(wild), "permutation=" + fmt("%.3f", perm) +
                                    " wild=" + fmt("%.3f", wild)};
}

Outcome sandwich_exhaustive() {
  std::mt19937_64 g(kSeed);
  long checked = 0, violations = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const FiniteDist R = random_dist(g, 3, 0.02);
    for (int m = 1; m <= 15; ++m) {
      for (const auto& T : enumerate_types(m, 3)) {
        const auto b = type_prob_sandwich(T, R);
        ++checked;
        if (!(b.lower <= b.exact * (1 + 1e-12) &&
              b.exact <= b.upper * (1 + 1e-12))) {
          ++violations;
        }
      }
    }
  }
  return {violations == 0, std::to_string(checked) + " types, " +
                               std::to_string(violations) + " violations"};
}

Outcome sanov_checks() {
  const FiniteDist P({0.5, 0.5}), Q({0.9, 0.1});
  bool ok = true;
  std::string d;
  for (int n : {20, 40, 60}) {
    const auto r = sanov_sandwich_check(P, Q, 0.2, n);
    ok = ok && !r.vacuous && r.lower_ok && r.upper_ok;
    d += "r_" + std::to_string(n) + "=" + fmt("%.4f", r.rate) + " ";
  }
  const auto e = extended_sanov_check(P, Q, 0.2, 20, 20);
  ok = ok && !e.vacuous && e.lower_ok && e.upper_ok;
  d += "extended r=" + fmt("%.4f", e.rate) + " j_min=" + fmt("%.4f", e.j_min);
  return {ok, d};
}

Outcome dstar_grid_agreement() {
  std::mt19937_64 g(kSeed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const int t = 2 + rep % 2;
    const FiniteDist P = random_dist(g, t, 0.02);
    const FiniteDist Q = random_dist(g, t, 0.02);
    const double c = u(g);
    worst = std::max(worst, std::abs(dstar(P, Q, c) - dstar_grid(P, Q, c)));
  }
  const double ref = dstar(FiniteDist({0.5, 0.5}), FiniteDist({0.9, 0.1}), 0.5);
  return {worst <= kDstarTol && std::abs(ref - kDstarRef) <= kDstarTol,
          "max |closed - grid|=" + fmt("%.2e", worst) +
              " reference=" + fmt("%.6f", ref)};
}

Outcome chernoff_stein() {
  const FiniteDist P({0.5, 0.5}), Q({0.9, 0.1});
  std::vector<double> n, b;
  for (const auto& r : exact_delta_curve(P, Q, kAlpha, {20, 30, 40, 50, 60})) {
    n.push_back(r.n);
    b.push_back(r.type2);
  }
  const auto exact = fit_exponent(n, b);
  const bool exact_ok = exact.slope > 0 && exact.slope <= kKlDemo + kSlopeSlack;

  const auto preset = make_preset("finite-demo", kSeed);
  const ExperimentConfig* lr = nullptr;
  for (const auto& c : preset.configs) {
    if (c.kind == TestKind::kLrOracle) lr = &c;
  }
  const auto fit = fit_exponent(estimate_error_rates(*lr), ExponentAxis::kN);
  const double rel = std::abs(fit.slope - kKlDemo) / kKlDemo;
  const bool lr_ok = rel <= kLrSlopeRel;
  return {exact_ok && lr_ok,
          "exact slope=" + fmt("%.4f", exact.slope) +
              (exact_ok ? " ok" : " FAIL") +
              "; LR slope=" + fmt("%.4f", fit.slope) + " (" +
              fmt("%.1f", 100 * rel) + "% from D(P||Q))" +
              (lr_ok ? " ok" : " FAIL")};
}

Outcome unbiasedness() {
  const auto k = KernelSpec::gaussian(1.0);
  const auto P = TargetModel::gaussian_1d(0, 1);
  const auto Q = TargetModel::gaussian_1d(1, 1);
  std::vector<double> one, two;
  for (int t = 0; t < 2000; ++t) {
    RngStream r(kSeed, static_cast<std::uint64_t>(t));
    RngStream rx = r.child(0), ry = r.child(1);
    const Sample X = sample(Q, 50, rx);
    const Sample Y = sample(P, 50, ry);
    one.push_back(mmd2_unbiased_model(P, k, X).value);
    two.push_back(mmd2_unbiased_two(k, Y, X).value);
  }
  const auto a = testing::mean_se(one), b = testing::mean_se(two);
  bool ok = std::abs(a.mean - kPopMmd) <= 3 * a.se &&
            std::abs(b.mean - kPopMmd) <= 3 * b.se;

  std::mt19937_64 g(kSeed);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  int violations = 0;
  for (int t = 0; t < 500; ++t) {
    const auto kt = KernelSpec::gaussian(u(g));
    const Eigen::Index m = 2 + t % 25, n = 2 + (7 * t) % 19;
    const Sample Y = testing::normal_sample(g, m, 1, u(g));
    const Sample X = testing::normal_sample(g, n, 1, u(g), 0.5);
    const auto Pt = TargetModel::gaussian_1d(0.0, u(g));
    const double g1 = std::abs(mmd2_unbiased_model(Pt, kt, X).value -
                               mmd2_biased_model(Pt, kt, X).value);
    const double g2 = std::abs(mmd2_unbiased_two(kt, Y, X).value -
                               mmd2_biased_two(kt, Y, X).value);
    if (g1 > kt.bound() / n + 1e-12) ++violations;
    if (g2 > kt.bound() / m + kt.bound() / n + 1e-12) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, "one-sample mean=" + fmt("%.5f", a.mean) + " (se " +
                  fmt("%.5f", a.se) + ") two-sample mean=" +
                  fmt("%.5f", b.mean) + " (se " + fmt("%.5f", b.se) +
                  ") gap violations=" + std::to_string(violations)};
}

Outcome stein_checks() {
  std::mt19937_64 g(kSeed);
  const double h = 1e-5;
  double worst = 0.0;
  for (const auto& s : {KernelSpec::gaussian(1.3), KernelSpec::imq(1.0, -0.5)}) {
    for (Eigen::Index d : {1, 2, 5}) {
      for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd x = testing::normal_point(g, d);
        const Eigen::VectorXd y = testing::normal_point(g, d);
        const Eigen::VectorXd grad = kernel_grad_x(s, x, y);
        double trace_fd = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          Eigen::VectorXd xp = x, xm = x, yp = y, ym = y;
          xp[k] += h;
          xm[k] -= h;
          yp[k] += h;
          ym[k] -= h;
          const double fd =
              (eval_kernel(s, xp, y) - eval_kernel(s, xm, y)) / (2 * h);
          worst = std::max(worst, testing::rel_err(grad[k], fd));
          trace_fd +=
              (kernel_grad_x(s, x, yp)[k] - kernel_grad_x(s, x, ym)[k]) / (2 * h);
        }
        worst = std::max(worst,
                         testing::rel_err(kernel_trace_grad_xy(s, x, y), trace_fd));
      }
    }
  }
  const SteinContext ctx(TargetModel::gaussian_1d(0, 1),
                         KernelSpec::gaussian(1.0));
  double stein = 0.0;
  for (double y : {-4.0, -2.5, -1.0, -0.3, 0.0, 0.4, 1.2, 2.0, 3.7, 5.0}) {
    stein = std::max(stein, std::abs(stein_mean_check(ctx, y)));
  }
  std::vector<double> u;
  for (int t = 0; t < 200; ++t) {
    RngStream r(kSeed, static_cast<std::uint64_t>(t));
    u.push_back(ksd2_ustat(ctx, sample(ctx.model(), 1000, r)));
  }
  const auto ms = testing::mean_se(u);
  const bool ok = worst <= kFdTol && stein <= kSteinTol &&
                  std::abs(ms.mean) <= 3 * ms.se;
  return {ok, "max FD rel err=" + fmt("%.2e", worst) + " max |stein mean|=" +
                  fmt("%.2e", stein) + " U mean=" + fmt("%.2e", ms.mean) +
                  " (se " + fmt("%.2e", ms.se) + ")"};
}

Outcome figure_shape() {
  const auto preset = make_preset("gauss_vs_laplace", kSeed);
  std::vector<ErrorCurve> curves;
  for (const auto& c : preset.configs) curves.push_back(estimate_error_rates(c));
  const ErrorCurve* lr = nullptr;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (preset.configs[i].kind == TestKind::kLrOracle) lr = &curves[i];
  }
  bool ok = lr != nullptr;
  std::string d;
  long below = 0, compared = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (preset.configs[i].kind == TestKind::kLrOracle) continue;
    const auto& rows = curves[i].rows;
    const bool dec = rows.back().type2_hat < rows.front().type2_hat;
    bool lr_below = true;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      lr_below = lr_below && lr->rows[j].type2_hat <= rows[j].type2_hat + kLrSlack;
      below += rows[j].below_dfree;
      compared += rows[j].dfree_compared;
    }
    ok = ok && dec && lr_below;
    d += curves[i].name + " beta " + fmt("%.3f", rows.front().type2_hat) +
         "->" + fmt("%.3f", rows.back().type2_hat) +
         (lr_below ? "" : " (LR above)") + "; ";
  }
  const double frac = compared ? double(below) / compared : 0.0;
  ok = ok && compared > 0 && frac >= kBelowDfree;
  d += "bootstrap below dfree " + fmt("%.3f", frac);
  return {ok, d};
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "kuht_acceptance";
  fs::remove_all(root);
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = cli +
                            " experiment --preset gauss_vs_laplace --seed 42"
                            " --out " +
                            (root / sub).string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, "cli exited with status " + std::to_string(status)};
    }
  }
  int files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".svg") continue;
    ++files;
    same += slurp(e.path()) == slurp(root / "b" / e.path().filename()) ? 1 : 0;
  }
  fs::remove_all(root);
  return {files > 0 && same == files,
          std::to_string(same) + "/" + std::to_string(files) +
              " files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "kuht";
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "level guarantee", 60, level_guarantee},
      {2, "calibrated levels", 300, calibrated_levels},
      {3, "type sandwich", 30, sandwich_exhaustive},
      {4, "finite-n Sanov", 60, sanov_checks},
      {5, "D* closed form", 30, dstar_grid_agreement},
      {6, "Chernoff-Stein bound", 120, chernoff_stein},
      {7, "unbiasedness", 120, unbiasedness},
      {8, "Stein checks", 60, stein_checks},
      {9, "figure shape", 900, figure_shape},
      {10, "determinism", 1800, [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << "criterion " << c.id << " (" << c.name
              << "): " << (pass ? "PASS" : "FAIL") << " | " << o.detail
              << " | " << fmt("%.1f", secs) << " s"
              << (in_time ? "" : " over limit " + fmt("%.0f", c.limit_s) + " s")
              << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed"
                       : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
