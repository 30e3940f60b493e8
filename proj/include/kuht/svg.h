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

#ifndef KUHT_SVG_H_
#define KUHT_SVG_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kuht/harness.h"

namespace kuht {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "n";
  std::string y_label;
  bool y_log = false;
  // Fixed y range; data range otherwise. Log plots floor values at ymin.
  std::optional<std::pair<double, double>> y_range;
};

// Plot area geometry, shared with tests that map points back to data.
inline constexpr double kPlotLeft = 70.0;
inline constexpr double kPlotRight = 560.0;
inline constexpr double kPlotTop = 40.0;
inline constexpr double kPlotBottom = 360.0;

// Self-contained SVG line chart, one polyline per series. The output is a
// pure function of the input.
std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec);

// One series per curve: field(row) against row.n (or against x_values, one
// per curve, when given).
std::vector<Series> curves_to_series(
    const std::vector<ErrorCurve>& curves, bool type2,
    const std::vector<double>* x_values = nullptr);

void emit_svg(const std::vector<Series>& series, const PlotSpec& spec,
              const std::string& path);

}  // namespace kuht

#endif  // KUHT_SVG_H_
