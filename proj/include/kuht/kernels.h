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

#ifndef KUHT_KERNELS_H_
#define KUHT_KERNELS_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace kuht {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::Ref<const Eigen::VectorXd>;

// Where a sample came from. Unseeded samples (hand-built in tests or read
// from input) carry has_seed == false.
struct SeedLineage {
  bool has_seed = false;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// n observations in R^d, stored row-major so each point is contiguous.
class Sample {
 public:
  // Throws InvalidInput on an empty matrix or non-finite entries.
  explicit Sample(RowMatrix data, SeedLineage lineage = {});

  // One-dimensional sample from a list of scalars.
  static Sample from_values(std::span<const double> values);
  static Sample from_values(std::initializer_list<double> values);

  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index d() const { return data_.cols(); }
  const RowMatrix& data() const { return data_; }
  const SeedLineage& lineage() const { return lineage_; }

  Eigen::Map<const Eigen::VectorXd> point(Eigen::Index i) const {
    return Eigen::Map<const Eigen::VectorXd>(data_.row(i).data(), d());
  }

  // Rows listed in `rows`, in that order.
  Sample subset(std::span<const Eigen::Index> rows) const;

 private:
  RowMatrix data_;
  SeedLineage lineage_;
};

// Stacks a on top of b; dimensions must agree.
Sample concat(const Sample& a, const Sample& b);

struct GaussianKernel {
  double w;  // k(x,y) = exp(-|x-y|^2 / (2w))
};

struct ImqKernel {
  double c;    // k(x,y) = (c^2 + |x-y|^2)^eta
  double eta;  // in (-1, 0)
};

// Indicator kernel on the alphabet {0, ..., t-1}.
struct DeltaKernel {
  int t;
};

// Finite family of Gaussian kernels, used only through mmd::sup_family.
struct KernelFamily {
  std::vector<double> bandwidths;
};

class KernelSpec {
 public:
  using Variant =
      std::variant<GaussianKernel, ImqKernel, DeltaKernel, KernelFamily>;

  static KernelSpec gaussian(double w);
  static KernelSpec imq(double c, double eta);
  static KernelSpec delta(int t);
  static KernelSpec family(std::vector<double> bandwidths);

  const Variant& variant() const { return variant_; }

  // Uniform upper bound K on k(.,.).
  double bound() const;

  bool is_family() const {
    return std::holds_alternative<KernelFamily>(variant_);
  }
  bool is_differentiable() const {
    return std::holds_alternative<GaussianKernel>(variant_) ||
           std::holds_alternative<ImqKernel>(variant_);
  }

  // Member kernels of a family; a non-family spec returns itself.
  std::vector<KernelSpec> members() const;

  // Canonical descriptor, parseable by parse_kernel.
  std::string to_string() const;

 private:
  explicit KernelSpec(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

// Parses `gaussian:w=1.0`, `imq:c=1.0,eta=-0.5`, `delta:t=3` and
// `family:gaussian:w=0.5;1;2`.
KernelSpec parse_kernel(std::string_view text);

double eval_kernel(const KernelSpec& spec, Point x, Point y);

// (i,j) entry is eval_kernel(spec, X_i, Y_j).
Eigen::MatrixXd gram(const KernelSpec& spec, const Sample& X, const Sample& Y);

// Gradient of k(x, y) in its first argument.
Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, Point x, Point y);

// trace of the mixed Hessian d^2 k / (dx dy^T).
double kernel_trace_grad_xy(const KernelSpec& spec, Point x, Point y);

// Median heuristic: median pairwise squared distance over 2. Falls back to
// the smallest positive squared distance over 2 when the median is zero.
double median_bandwidth(const Sample& X);

// ---------------------------------------------------------------------------
// Batch kernel sums used by the quadratic-time statistics. Each returns the
// same value regardless of threading: rows are summed in index order and the
// row totals are combined with pairwise_sum.

struct WithinSums {
  double off_diagonal;  // sum over i != j
  double diagonal;      // sum over i
};

WithinSums kernel_within_sums(const KernelSpec& spec, const Sample& X);

// sum_i sum_j k(x_i, y_j)
double kernel_cross_sum(const KernelSpec& spec, const Sample& X,
                        const Sample& Y);

// k(x, Z_j) for j in [begin, end), written into out (resized).
void kernel_row(const KernelSpec& spec, Point x, const Sample& Z,
                Eigen::Index begin, Eigen::Index end, Eigen::ArrayXd& out);

// Low-rank factor G ~= L L^T of gram(spec, Z, Z) from diagonally pivoted
// Cholesky, stopped once the largest residual diagonal is <= tol. Since the
// residual E = G - L L^T is PSD, |s^T E s| <= |s|^2 * residual_trace.
struct GramFactor {
  Eigen::MatrixXd L;         // N x rank
  Eigen::VectorXd diagonal;  // exact k(z_i, z_i)
  double residual_trace = 0.0;
};

GramFactor pivoted_cholesky(const KernelSpec& spec, const Sample& Z,
                            double tol = 1e-12);

}  // namespace kuht

#endif  // KUHT_KERNELS_H_
