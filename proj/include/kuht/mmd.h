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

#ifndef KUHT_MMD_H_
#define KUHT_MMD_H_

#include <optional>

#include "kuht/kernels.h"
#include "kuht/targets.h"

namespace kuht {

enum class MmdKind { kBiased, kUnbiased };

// A squared-MMD estimate. Biased values are >= 0; unbiased ones may be
// negative.
struct MmdValue {
  double value;
  MmdKind kind;
  Eigen::Index n;                   // size of the observed sample X
  std::optional<Eigen::Index> m;    // size of the model sample Y, if any
};

// (1/n^2) sum_ij k(x_i,x_j) + E k(y,y') - (2/n) sum_i E_y k(x_i,y),
// with y, y' ~ model.
MmdValue mmd2_biased_model(const TargetModel& model, const KernelSpec& spec,
                           const Sample& X);

// Same, with the within-sample term averaged over i != j. Needs n >= 2.
MmdValue mmd2_unbiased_model(const TargetModel& model, const KernelSpec& spec,
                             const Sample& X);

// V-statistic estimate of MMD^2 between the empirical measures of Y (size m)
// and X (size n).
MmdValue mmd2_biased_two(const KernelSpec& spec, const Sample& Y,
                         const Sample& X);

// U-statistic version; needs m, n >= 2.
MmdValue mmd2_unbiased_two(const KernelSpec& spec, const Sample& Y,
                           const Sample& X);

// Closed-form MMD^2 between two Gaussian/mixture models (Gaussian kernel), or
// two finite models under the delta kernel.
double population_mmd2(const TargetModel& P, const TargetModel& Q,
                       const KernelSpec& spec);

// max over family members of sqrt(mmd2_biased_two). Not squared.
double sup_family(const KernelSpec& family, const Sample& Y, const Sample& X);

// Clamps a biased estimate in [-1e-12, 0) to 0; anything more negative is a
// bug and raises InternalConsistency.
double clamp_biased(double value);

}  // namespace kuht

#endif  // KUHT_MMD_H_
