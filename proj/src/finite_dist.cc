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

#include "kuht/finite_dist.h"

#include <cmath>
#include <limits>

#include "kuht/error.h"
#include "kuht/numeric.h"

namespace kuht {

FiniteDist::FiniteDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw InvalidInput("finite distribution needs an alphabet of size >= 2");
  }
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidInput("finite distribution has a negative or non-finite "
                         "probability");
    }
  }
  if (std::abs(pairwise_sum(probs_) - 1.0) > 1e-12) {
    throw InvalidInput("finite distribution does not sum to 1");
  }
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidInput("kl_divergence: alphabet sizes differ");
  }
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    terms.push_back(p[i] * std::log(p[i] / q[i]));
  }
  return pairwise_sum(terms);
}

}  // namespace kuht
