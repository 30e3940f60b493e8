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

#include "kuht/numeric.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kuht {
namespace {

constexpr std::size_t kLeafSize = 8;

double sum_range(const double* p, std::size_t n) {
  if (n <= kLeafSize) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t half = n / 2;
  return sum_range(p, half) + sum_range(p + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> terms) {
  return sum_range(terms.data(), terms.size());
}

double log_sum_exp(std::span<const double> v) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  if (v.empty()) return neg_inf;
  const double mx = *std::max_element(v.begin(), v.end());
  if (mx == neg_inf) return neg_inf;
  std::vector<double> shifted(v.size());
  std::transform(v.begin(), v.end(), shifted.begin(),
                 [mx](double x) { return std::exp(x - mx); });
  return mx + std::log(pairwise_sum(shifted));
}

}  // namespace kuht
