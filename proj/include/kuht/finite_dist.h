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

#ifndef KUHT_FINITE_DIST_H_
#define KUHT_FINITE_DIST_H_

#include <cstddef>
#include <span>
#include <vector>

namespace kuht {

// Probability vector on the alphabet {0, ..., t-1}, t >= 2.
class FiniteDist {
 public:
  // Throws InvalidInput unless entries are >= 0 and sum to 1 within 1e-12.
  explicit FiniteDist(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const FiniteDist&, const FiniteDist&) = default;

 private:
  std::vector<double> probs_;
};

// D(p || q) in nats; +inf when q has a zero where p is positive.
double kl_divergence(std::span<const double> p, std::span<const double> q);

}  // namespace kuht

#endif  // KUHT_FINITE_DIST_H_
