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
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "svg_parse.h"

namespace kuht {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const char* cli = std::getenv("KUHT_CLI");
  const std::string cmd = std::string(cli ? cli : KUHT_CLI_PATH) + " " + args +
                          " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& f) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(f));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kuht_cli_" + std::string(::testing::UnitTest::GetInstance()
                                          ->current_test_info()
                                          ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

const char* kCustom =
    "experiment --kind simple --model gauss:mu=0,sigma2=1 "
    "--alt-model gauss:mu=1,sigma2=1 --kernel gaussian:w=1 --threshold dfree "
    "--n 20,40,80 --trials 30 --name simple";

TEST_F(CliTest, TestSubcommand) {
  {
    std::ofstream f(dir_ / "x.txt");
    f << "0.1\n-0.3\n1.2\n0.5\n";
  }
  const auto r = run("test --kind simple --model gauss:mu=0,sigma2=1 "
                     "--kernel gaussian:w=1 --alpha 0.1 --n 100 "
                     "--threshold dfree --seed 7");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("decision="), std::string::npos);
  const auto j = run("test --kind ksd_v --model gauss:mu=0,sigma2=1 "
                     "--kernel median --threshold wild:B=100 --data " +
                     (dir_ / "x.txt").string() + " --out " +
                     (dir_ / "r.json").string());
  EXPECT_EQ(j.code, 0);
  const auto report = nlohmann::json::parse(slurp(dir_ / "r.json"));
  EXPECT_EQ(report["rule"], "wild:B=100");
  EXPECT_EQ(report["decision"] == "reject_H0",
            report["statistic"].get<double>() >
                report["threshold"].get<double>());
  const auto c = run("calibrate --kind two_sample --model gauss:mu=0,sigma2=1 "
                     "--kernel gaussian:w=1 --threshold perm:B=100 --n 30 "
                     "--m equal");
  EXPECT_EQ(c.code, 1);  // --m takes a count
  const auto c2 = run("calibrate --kind two_sample --model gauss:mu=0,sigma2=1 "
                      "--kernel gaussian:w=1 --threshold perm:B=100 --n 30 "
                      "--m-rule equal");
  EXPECT_EQ(c2.code, 0);
  EXPECT_NE(c2.out.find("threshold="), std::string::npos);
}

TEST_F(CliTest, LikelihoodRatioNeedsAlternative) {
  const auto r = run("test --kind lr --model 'finite:p=.5;.5' "
                     "--alt-model 'finite:p=.9;.1' "
                     "--data-model 'finite:p=.9;.1' --threshold mc:B=100 "
                     "--n 30");
  ASSERT_EQ(r.code, 0);
  const auto at = r.out.find("statistic=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NE(std::stod(r.out.substr(at + 10)), 0.0);
  EXPECT_EQ(run("test --kind lr --model 'finite:p=.5;.5' --threshold mc:B=100")
                .code,
            1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("test --kind simple --model gauss:mu=0,sigma2=1 --alpha 1.5")
                .code,
            1);
  EXPECT_EQ(run("test --kind simple --bogus 3").code, 1);
  EXPECT_EQ(run("test --kind nope").code, 1);
  EXPECT_EQ(run("test --kind simple --threshold perm:B=100").code, 1);
  EXPECT_EQ(run("experiment --preset gauss_vs_laplace --kind simple").code, 1);
  EXPECT_EQ(run("sanov --p '.5;.5'").code, 1);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_NE(run("--help").out.find("experiment"), std::string::npos);
  EXPECT_EQ(run("test --kind simple --model gauss:mu=0,sigma2=1 "
                "--data /nonexistent/file")
                .code,
            2);
}

TEST_F(CliTest, ExperimentCsvAndSvgAgree) {
  const auto r = run(std::string(kCustom) + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0);
  fs::path csv;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() == ".csv") csv = e.path();
  }
  ASSERT_FALSE(csv.empty());
  const auto rows = read_csv(csv);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].size(), 9u);
  EXPECT_EQ(rows[0][0], "n");
  std::vector<double> beta;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 9u);
    const double a = std::stod(rows[i][3]), b = std::stod(rows[i][4]);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 0.1);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
    EXPECT_EQ(rows[i][2], "30");
    EXPECT_EQ(rows[i][8], "42");
    beta.push_back(b);
  }
  fs::path svg;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().filename().string().find("type2.svg") != std::string::npos) {
      svg = e.path();
    }
  }
  ASSERT_FALSE(svg.empty());
  const auto plot = testing::parse_plot(slurp(svg));
  ASSERT_EQ(plot.polylines, 1);
  const auto& pts = plot.series.begin()->second;
  ASSERT_EQ(pts.size(), 3u);
  const double ns[] = {20, 40, 80};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(pts[i].first, ns[i], testing::plot_tolerance(plot, true, 0));
    EXPECT_NEAR(pts[i].second, beta[i],
                testing::plot_tolerance(plot, false, beta[i]));
  }
}

TEST_F(CliTest, ExperimentDeterministic) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run(std::string(kCustom) + " --seed 5 --out " + a.string()).code, 0);
  ASSERT_EQ(run(std::string(kCustom) + " --seed 5 --out " + b.string()).code, 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename()));
  }
  EXPECT_EQ(files, 3);
}

TEST_F(CliTest, PresetRunsWithOverrides) {
  const auto r = run("experiment --preset gauss_mixture --trials 6 "
                     "--replicates 50 --n 20,30 --out " +
                     dir_.string());
  ASSERT_EQ(r.code, 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    const auto rows = read_csv(e.path());
    EXPECT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][2], "6");
  }
  EXPECT_GE(csvs, 3);
}

TEST_F(CliTest, Sanov) {
  const auto r = run("sanov --p '.5;.5' --q '.9;.1' --gamma 0.2 --n 20,40,60 "
                     "--pair 20:20 --out " +
                     dir_.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sanov_report.json"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir_ / "sanov_report.json"));
  EXPECT_TRUE(j["holds"].get<bool>());
  ASSERT_EQ(j["sanov"].size(), 3u);
  for (const auto& rep : j["sanov"]) EXPECT_TRUE(rep["holds"].get<bool>());
  ASSERT_EQ(j["extended"].size(), 1u);
  EXPECT_TRUE(j["extended"][0]["holds"].get<bool>());
  EXPECT_EQ(run("sanov --p '.5;.5' --q '.9;.2' --gamma 0.2").code, 1);
}

TEST_F(CliTest, Exponent) {
  const auto r = run("exponent --preset finite-demo --trials 60 --out " +
                     dir_.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("reference_kl=0.510826"), std::string::npos);
  EXPECT_NE(r.out.find("slope_exact="), std::string::npos);
  EXPECT_EQ(run("exponent --preset gauss_vs_laplace").code, 1);
}

}  // namespace
}  // namespace kuht
