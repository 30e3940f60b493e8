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

#include "kuht/mmd.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "kuht/error.h"
#include "kuht/numeric.h"

namespace kuht {
namespace {

constexpr double kNegativeSlack = 1e-12;

void reject_family(const KernelSpec& spec) {
  if (spec.is_family()) {
    throw InvalidInput("use sup_family for kernel families");
  }
}

double embedding_term(const TargetModel& model, const KernelSpec& spec,
                      const Sample& X) {
  std::vector<double> terms(static_cast<std::size_t>(X.n()));
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    terms[static_cast<std::size_t>(i)] =
        mean_embedding_dot(model, spec, X.point(i));
  }
  return pairwise_sum(terms);
}

void check_dims(const Sample& Y, const Sample& X) {
  if (Y.d() != X.d()) {
    throw InvalidInput("samples have different dimensions");
  }
}

}  // namespace

double clamp_biased(double value) {
  if (value >= 0.0) return value;
  if (value >= -kNegativeSlack) return 0.0;
  throw InternalConsistency("biased MMD estimate is negative: " +
                            std::to_string(value));
}

MmdValue mmd2_biased_model(const TargetModel& model, const KernelSpec& spec,
                           const Sample& X) {
  reject_family(spec);
  const double n = static_cast<double>(X.n());
  const WithinSums w = kernel_within_sums(spec, X);
  const double value = (w.off_diagonal + w.diagonal) / (n * n) +
                       embedding_norm_sq(model, spec) -
                       2.0 * embedding_term(model, spec, X) / n;
  return {clamp_biased(value), MmdKind::kBiased, X.n(), std::nullopt};
}

MmdValue mmd2_unbiased_model(const TargetModel& model, const KernelSpec& spec,
                             const Sample& X) {
  reject_family(spec);
  if (X.n() < 2) throw InvalidInput("unbiased MMD needs n >= 2");
  const double n = static_cast<double>(X.n());
  const WithinSums w = kernel_within_sums(spec, X);
  const double value = w.off_diagonal / (n * (n - 1.0)) +
                       embedding_norm_sq(model, spec) -
                       2.0 * embedding_term(model, spec, X) / n;
  return {value, MmdKind::kUnbiased, X.n(), std::nullopt};
}

MmdValue mmd2_biased_two(const KernelSpec& spec, const Sample& Y,
                         const Sample& X) {
  reject_family(spec);
  check_dims(Y, X);
  const double m = static_cast<double>(Y.n());
  const double n = static_cast<double>(X.n());
  const WithinSums wy = kernel_within_sums(spec, Y);
  const WithinSums wx = kernel_within_sums(spec, X);
  const double cross = kernel_cross_sum(spec, Y, X);
  const double value = (wy.off_diagonal + wy.diagonal) / (m * m) +
                       (wx.off_diagonal + wx.diagonal) / (n * n) -
                       2.0 * cross / (m * n);
  return {clamp_biased(value), MmdKind::kBiased, X.n(), Y.n()};
}

MmdValue mmd2_unbiased_two(const KernelSpec& spec, const Sample& Y,
                           const Sample& X) {
  reject_family(spec);
  check_dims(Y, X);
  if (Y.n() < 2 || X.n() < 2) {
    throw InvalidInput("unbiased two-sample MMD needs m, n >= 2");
  }
  const double m = static_cast<double>(Y.n());
  const double n = static_cast<double>(X.n());
  const WithinSums wy = kernel_within_sums(spec, Y);
  const WithinSums wx = kernel_within_sums(spec, X);
  const double cross = kernel_cross_sum(spec, Y, X);
  const double value = wy.off_diagonal / (m * (m - 1.0)) +
                       wx.off_diagonal / (n * (n - 1.0)) -
                       2.0 * cross / (m * n);
  return {value, MmdKind::kUnbiased, X.n(), Y.n()};
}

double population_mmd2(const TargetModel& P, const TargetModel& Q,
                       const KernelSpec& spec) {
  const double value = cross_embedding(P, P, spec) +
                       cross_embedding(Q, Q, spec) -
                       2.0 * cross_embedding(P, Q, spec);
  return clamp_biased(value);
}

double sup_family(const KernelSpec& family, const Sample& Y,
                  const Sample& X) {
  if (!family.is_family()) {
    throw InvalidInput("sup_family expects a kernel family");
  }
  const auto members = family.members();
  if (members.empty()) throw InvalidInput("kernel family is empty");
  double best = 0.0;
  for (const auto& k : members) {
    best = std::max(best, std::sqrt(mmd2_biased_two(k, Y, X).value));
  }
  return best;
}

}  // namespace kuht
