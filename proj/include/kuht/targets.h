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

#ifndef KUHT_TARGETS_H_
#define KUHT_TARGETS_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kuht/finite_dist.h"
#include "kuht/kernels.h"
#include "kuht/rng.h"

namespace kuht {

// Isotropic Gaussian N(mu, sigma2 I).
struct GaussianDiag {
  Eigen::VectorXd mu;
  double sigma2;
};

// sum_k weights[k] N(means[k], sigma2 I) with a shared variance.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  double sigma2;
};

struct Laplace1D {
  double mu;
  double b;
};

// Distribution on the alphabet {0, ..., t-1}; points are 1-d symbol indices.
struct FiniteModel {
  FiniteDist probs;
};

class TargetModel {
 public:
  using Variant =
      std::variant<GaussianDiag, GaussianMixture, Laplace1D, FiniteModel>;

  static TargetModel gaussian(Eigen::VectorXd mu, double sigma2);
  static TargetModel gaussian_1d(double mu, double sigma2);
  static TargetModel mixture(std::vector<double> weights,
                             std::vector<Eigen::VectorXd> means,
                             double sigma2);
  static TargetModel mixture_1d(std::vector<double> weights,
                                const std::vector<double>& means,
                                double sigma2);
  static TargetModel laplace(double mu, double b);
  static TargetModel finite(FiniteDist probs);

  const Variant& variant() const { return variant_; }
  Eigen::Index dim() const;
  bool is_continuous() const {
    return !std::holds_alternative<FiniteModel>(variant_);
  }

  // Same distribution, with log_density shifted by `offset` (an unnormalized
  // density). Scores and sampling are unaffected.
  TargetModel with_log_offset(double offset) const;
  double log_offset() const { return log_offset_; }

  std::string to_string() const;

 private:
  explicit TargetModel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
  double log_offset_ = 0.0;
};

// Parses `gauss:mu=0,sigma2=8`, `laplace:mu=0,b=2`,
// `mix:w=.5;.5,mu=-1;1,sigma2=1` and `finite:p=.5;.5`. Gaussian means may be
// vectors (`mu=0;0`); mixture means are one-dimensional.
TargetModel parse_model(std::string_view text);

// n i.i.d. draws; advances rng.
Sample sample(const TargetModel& model, Eigen::Index n, RngStream& rng);

// Log density (or log pmf for finite models, where x holds the symbol).
// Zero-probability symbols give -inf.
double log_density(const TargetModel& model, Point x);

// grad_x log p(x). Laplace uses score(mu) = 0 at the kink.
Eigen::VectorXd score(const TargetModel& model, Point x);

// E_{y ~ P} k(x, y). Closed forms: Gaussian kernel with Gaussian or mixture
// models, and the delta kernel with finite models.
double mean_embedding_dot(const TargetModel& model, const KernelSpec& spec,
                          Point x);

// E_{y, y' ~ P} k(y, y').
double embedding_norm_sq(const TargetModel& model, const KernelSpec& spec);

// E_{y ~ P, x ~ Q} k(y, x).
double cross_embedding(const TargetModel& P, const TargetModel& Q,
                       const KernelSpec& spec);

// D(P || Q) in nats. Gaussian pairs use the closed form; other 1-d
// continuous pairs use adaptive quadrature; finite pairs a direct sum.
double kld(const TargetModel& P, const TargetModel& Q);

// Integration window [lo, hi] covering +-12 standard deviations of every
// component of the given models; 1-d continuous models only.
struct Window {
  double lo;
  double hi;
  std::vector<double> kinks;
};
Window quadrature_window(const std::vector<const TargetModel*>& models);

}  // namespace kuht

#endif  // KUHT_TARGETS_H_
