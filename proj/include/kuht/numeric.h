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

#ifndef KUHT_NUMERIC_H_
#define KUHT_NUMERIC_H_

#include <cstddef>
#include <span>
#include <vector>

namespace kuht {

// Pairwise (tree) summation with a shape fixed by the length alone, so the
// result is identical no matter which thread produced the terms.
double pairwise_sum(std::span<const double> terms);

// Running Kahan-compensated sum; used where terms arrive one at a time.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// log(sum(exp(v))) without overflow; returns -inf for an empty input or when
// every term is -inf.
double log_sum_exp(std::span<const double> v);

}  // namespace kuht

#endif  // KUHT_NUMERIC_H_
