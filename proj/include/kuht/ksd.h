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

#ifndef KUHT_KSD_H_
#define KUHT_KSD_H_

#include <optional>
#include <string>
#include <vector>

#include "kuht/kernels.h"
#include "kuht/targets.h"

namespace kuht {

// A continuous model (through its score only) paired with a differentiable
// kernel. The normalizing constant of the model never enters.
class SteinContext {
 public:
  // Throws Unsupported for finite models or non-differentiable kernels.
  SteinContext(TargetModel model, KernelSpec spec);

  const TargetModel& model() const { return model_; }
  const KernelSpec& kernel() const { return spec_; }

 private:
  TargetModel model_;
  KernelSpec spec_;
};

// h_p(x,y) = s(x).s(y) k + s(y).grad_x k + s(x).grad_y k + tr grad_xy k.
// Written so that h_p(x,y) == h_p(y,x) bit for bit.
double stein_kernel(const SteinContext& ctx, Point x, Point y);

// Same, with scores sx = s(x), sy = s(y) supplied by the caller.
double stein_kernel(const KernelSpec& spec, Point x, Point y, Point sx,
                    Point sy);

// Symmetric n x n matrix H_ij = h_p(x_i, x_j).
Eigen::MatrixXd stein_matrix(const SteinContext& ctx, const Sample& X);

// (1/n^2) sum_ij H_ij, tiny negatives (>= -1e-10) clamped to 0.
double ksd2_vstat(const SteinContext& ctx, const Sample& X);
double ksd2_vstat(const Eigen::MatrixXd& H);

// (1/(n(n-1))) sum_{i != j} H_ij; needs n >= 2.
double ksd2_ustat(const SteinContext& ctx, const Sample& X);
double ksd2_ustat(const Eigen::MatrixXd& H);

// integral of h_p(x, y) q(x) dx for a 1-d model, with q the context's model
// unless `against` is given. Zero (to quadrature accuracy) when q = p.
double stein_mean_check(const SteinContext& ctx, double y,
                        const TargetModel* against = nullptr);

// Which weak-convergence condition for KSD the (kernel, dimension) pair
// meets: 1 for a Gaussian kernel in d = 1, 3 for IMQ in any d, none
// otherwise.
std::optional<int> weak_convergence_condition(const KernelSpec& spec,
                                              Eigen::Index d);

// Human-readable caveats for a KSD test with this context in dimension d.
std::vector<std::string> ksd_warnings(const SteinContext& ctx, Eigen::Index d);

}  // namespace kuht

#endif  // KUHT_KSD_H_
