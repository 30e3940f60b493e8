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

#ifndef KUHT_CLI_H_
#define KUHT_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kuht/error.h"
#include "kuht/finite_dist.h"
#include "kuht/harness.h"

namespace kuht {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Carries the help text for --help.
class HelpRequest : public Error {
 public:
  using Error::Error;
};

enum class Subcommand { kTest, kExperiment, kCalibrate, kSanov, kExponent };

struct CliConfig {
  Subcommand subcommand = Subcommand::kTest;
  std::uint64_t seed = 42;
  std::string out;  // output directory, or report path for `test`

  // test, calibrate, and custom experiments.
  std::optional<ExperimentConfig> experiment;
  std::optional<TargetModel> data_model;  // source of X when not read
  std::optional<std::string> data_path;
  std::optional<std::string> data_y_path;
  std::optional<Eigen::Index> m;

  // experiment / exponent presets.
  std::string preset;
  PresetOptions preset_options;

  // sanov.
  std::optional<FiniteDist> p;
  std::optional<FiniteDist> q;
  double gamma = 0.0;
  std::vector<int> n_list;
  std::vector<std::pair<int, int>> pairs;
};

// argv[0] is the program name. Throws UsageError naming the offending flag;
// --help throws HelpRequest.
CliConfig parse_args(const std::vector<std::string>& argv);

// Runs a parsed config. Returns the process exit code.
int run_cli(const CliConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run_cli with exit codes 0 success, 1 usage, 2 runtime.
int cli_main(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err);

// Reads one point per line, coordinates separated by commas.
Sample read_sample(const std::string& path);

// Runs every config of a preset, writing <dir>/<preset>_<name>.csv and the
// type-I / type-II SVGs. Returns the written paths.
std::vector<std::string> write_experiment(const Preset& preset,
                                          const std::vector<ErrorCurve>& curves,
                                          const std::string& dir);

}  // namespace kuht

#endif  // KUHT_CLI_H_
