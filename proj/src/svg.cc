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

#include "kuht/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "kuht/error.h"

namespace kuht {
namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string g4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series,
                       const PlotSpec& spec) {
  if (series.empty()) throw InvalidInput("plot needs at least one series");
  double xmin = INFINITY, xmax = -INFINITY;
  double ymin = INFINITY, ymax = -INFINITY;
  double ypos = INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw InvalidInput("series '" + s.name + "' has mismatched x and y");
    }
    if (s.x.size() < 2) {
      throw InvalidInput("series '" + s.name + "' needs at least 2 points");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        throw InvalidInput("series '" + s.name + "' has a non-finite value");
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      if (s.y[i] > 0.0) ypos = std::min(ypos, s.y[i]);
    }
  }
  if (spec.y_range) {
    ymin = spec.y_range->first;
    ymax = spec.y_range->second;
  } else if (spec.y_log) {
    ymin = std::isfinite(ypos) ? ypos : 1e-3;
  }
  if (spec.y_log && !(ymin > 0.0)) {
    throw InvalidInput("log-scale plot needs a positive y minimum");
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax <= ymin) ymax = spec.y_log ? ymin * 10.0 : ymin + 1.0;

  auto px = [&](double x) {
    return kPlotLeft + (x - xmin) / (xmax - xmin) * (kPlotRight - kPlotLeft);
  };
  auto py = [&](double y) {
    double t;
    if (spec.y_log) {
      const double v = std::max(y, ymin);
      t = (std::log10(v) - std::log10(ymin)) /
          (std::log10(ymax) - std::log10(ymin));
    } else {
      t = (y - ymin) / (ymax - ymin);
    }
    return kPlotBottom - t * (kPlotBottom - kPlotTop);
  };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
    << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << fixed3((kPlotLeft + kPlotRight) / 2)
    << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";

  o << "<g id=\"plot\" data-xmin=\"" << format_g17(xmin)
    << "\" data-xmax=\"" << format_g17(xmax) << "\" data-ymin=\""
    << format_g17(ymin) << "\" data-ymax=\"" << format_g17(ymax)
    << "\" data-ylog=\"" << (spec.y_log ? 1 : 0) << "\">\n";
  o << "<rect x=\"" << fixed3(kPlotLeft) << "\" y=\"" << fixed3(kPlotTop)
    << "\" width=\"" << fixed3(kPlotRight - kPlotLeft) << "\" height=\""
    << fixed3(kPlotBottom - kPlotTop)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five ticks per axis.
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    o << "<line x1=\"" << fixed3(px(xv)) << "\" y1=\"" << fixed3(kPlotBottom)
      << "\" x2=\"" << fixed3(px(xv)) << "\" y2=\""
      << fixed3(kPlotBottom + 5) << "\" stroke=\"black\"/>"
      << "<text x=\"" << fixed3(px(xv)) << "\" y=\""
      << fixed3(kPlotBottom + 18) << "\" text-anchor=\"middle\">" << g4(xv)
      << "</text>\n";
    const double yv =
        spec.y_log ? std::pow(10.0, std::log10(ymin) +
                                        (std::log10(ymax) - std::log10(ymin)) *
                                            k / 4.0)
                   : ymin + (ymax - ymin) * k / 4.0;
    o << "<line x1=\"" << fixed3(kPlotLeft - 5) << "\" y1=\""
      << fixed3(py(yv)) << "\" x2=\"" << fixed3(kPlotLeft) << "\" y2=\""
      << fixed3(py(yv)) << "\" stroke=\"black\"/>"
      << "<text x=\"" << fixed3(kPlotLeft - 8) << "\" y=\""
      << fixed3(py(yv) + 4) << "\" text-anchor=\"end\">" << g4(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << fixed3((kPlotLeft + kPlotRight) / 2) << "\" y=\""
    << fixed3(kPlotBottom + 40) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fixed3((kPlotTop + kPlotBottom) / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fixed3((kPlotTop + kPlotBottom) / 2) << ")\">"
    << escape(spec.y_label) << "</text>\n";

  const std::size_t ncolors = sizeof(kPalette) / sizeof(kPalette[0]);
  for (std::size_t s = 0; s < series.size(); ++s) {
    o << "<polyline class=\"series\" data-series=\"" << escape(series[s].name)
      << "\" fill=\"none\" stroke=\"" << kPalette[s % ncolors]
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) o << ' ';
      o << fixed3(px(series[s].x[i])) << ',' << fixed3(py(series[s].y[i]));
    }
    o << "\"/>\n";
  }
  o << "</g>\n<g id=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kPlotTop + 10 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << fixed3(kPlotRight + 15) << "\" y1=\"" << fixed3(y)
      << "\" x2=\"" << fixed3(kPlotRight + 40) << "\" y2=\"" << fixed3(y)
      << "\" stroke=\"" << kPalette[s % ncolors]
      << "\" stroke-width=\"2\"/><text x=\"" << fixed3(kPlotRight + 46)
      << "\" y=\"" << fixed3(y + 4) << "\">" << escape(series[s].name)
      << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::vector<Series> curves_to_series(const std::vector<ErrorCurve>& curves,
                                     bool type2,
                                     const std::vector<double>* x_values) {
  if (x_values == nullptr) {
    std::vector<Series> out;
    for (const auto& c : curves) {
      Series s{c.name, {}, {}};
      for (const auto& r : c.rows) {
        s.x.push_back(static_cast<double>(r.n));
        s.y.push_back(type2 ? r.type2_hat : r.type1_hat);
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  // Swept curves: group by name with the bandwidth suffix removed, one
  // point per curve taken from its first row.
  if (x_values->size() != curves.size()) {
    throw InvalidInput("one axis value per curve is required");
  }
  std::vector<Series> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::string base = curves[i].name;
    const auto cut = base.rfind("_w");
    if (cut != std::string::npos) base = base.substr(0, cut);
    auto [it, inserted] = index.emplace(base, out.size());
    if (inserted) out.push_back({base, {}, {}});
    const auto& r = curves[i].rows.at(0);
    out[it->second].x.push_back((*x_values)[i]);
    out[it->second].y.push_back(type2 ? r.type2_hat : r.type1_hat);
  }
  return out;
}

void emit_svg(const std::vector<Series>& series, const PlotSpec& spec,
              const std::string& path) {
  const std::string text = render_svg(series, spec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
}

}  // namespace kuht
