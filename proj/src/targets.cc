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

#include "kuht/targets.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "kuht/error.h"
#include "kuht/numeric.h"
#include "kuht/quadrature.h"
#include "parse_util.h"

namespace kuht {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Gaussian and mixture models viewed as a weighted list of isotropic
// components with one shared variance.
struct Components {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  double sigma2;
};

std::optional<Components> as_components(const TargetModel& m) {
  if (const auto* g = std::get_if<GaussianDiag>(&m.variant())) {
    return Components{{1.0}, {g->mu}, g->sigma2};
  }
  if (const auto* g = std::get_if<GaussianMixture>(&m.variant())) {
    return Components{g->weights, g->means, g->sigma2};
  }
  return std::nullopt;
}

double gaussian_log_pdf(Point x, const Eigen::VectorXd& mu, double sigma2) {
  const double d = static_cast<double>(x.size());
  return -0.5 * d * (kLog2Pi + std::log(sigma2)) -
         (x - mu).squaredNorm() / (2.0 * sigma2);
}

void check_dim(const TargetModel& m, Point x) {
  if (x.size() != m.dim()) {
    throw InvalidInput("point dimension " + std::to_string(x.size()) +
                       " does not match model dimension " +
                       std::to_string(m.dim()));
  }
}

std::size_t symbol_of(const FiniteModel& f, Point x) {
  const double v = x[0];
  if (x.size() != 1 || v != std::floor(v) || v < 0 ||
      v >= static_cast<double>(f.probs.size())) {
    throw InvalidInput("finite model points must be symbol indices in [0, t)");
  }
  return static_cast<std::size_t>(v);
}

double normalized_log_density(const TargetModel& model, Point x) {
  check_dim(model, x);
  return std::visit(
      Overloaded{
          [&](const GaussianDiag& g) {
            return gaussian_log_pdf(x, g.mu, g.sigma2);
          },
          [&](const GaussianMixture& g) {
            std::vector<double> terms;
            terms.reserve(g.weights.size());
            for (std::size_t k = 0; k < g.weights.size(); ++k) {
              terms.push_back(std::log(g.weights[k]) +
                              gaussian_log_pdf(x, g.means[k], g.sigma2));
            }
            return log_sum_exp(terms);
          },
          [&](const Laplace1D& l) {
            return -std::log(2.0 * l.b) - std::abs(x[0] - l.mu) / l.b;
          },
          [&](const FiniteModel& f) {
            return std::log(f.probs[symbol_of(f, x)]);
          },
      },
      model.variant());
}

// Closed-form E k(Y, Y') for Y ~ N(mu_a, s_a I), Y' ~ N(mu_b, s_b I) and a
// Gaussian kernel with bandwidth w.
double gaussian_pair_embedding(const Eigen::VectorXd& mu_a, double s_a,
                               const Eigen::VectorXd& mu_b, double s_b,
                               double w) {
  const double v = w + s_a + s_b;
  const double d = static_cast<double>(mu_a.size());
  return std::pow(w / v, d / 2.0) *
         std::exp(-(mu_a - mu_b).squaredNorm() / (2.0 * v));
}

[[noreturn]] void no_closed_form(const TargetModel& m, const KernelSpec& k) {
  throw NoClosedForm("no closed-form kernel embedding for model " +
                     m.to_string() + " with kernel " + k.to_string());
}

double component_sd(const TargetModel& m) {
  return std::visit(
      Overloaded{
          [](const GaussianDiag& g) { return std::sqrt(g.sigma2); },
          [](const GaussianMixture& g) { return std::sqrt(g.sigma2); },
          [](const Laplace1D& l) { return l.b * std::numbers::sqrt2; },
          [](const FiniteModel&) -> double {
            throw Unsupported("finite models have no Lebesgue density");
          },
      },
      m.variant());
}

}  // namespace

// --- construction -------------------------------------------------------------

TargetModel TargetModel::gaussian(Eigen::VectorXd mu, double sigma2) {
  if (mu.size() < 1 || !mu.allFinite()) {
    throw InvalidInput("gaussian mean must be a finite vector");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidInput("gaussian variance must be > 0");
  }
  return TargetModel(GaussianDiag{std::move(mu), sigma2});
}

TargetModel TargetModel::gaussian_1d(double mu, double sigma2) {
  return gaussian(Eigen::VectorXd::Constant(1, mu), sigma2);
}

TargetModel TargetModel::mixture(std::vector<double> weights,
                                 std::vector<Eigen::VectorXd> means,
                                 double sigma2) {
  if (weights.empty() || weights.size() != means.size()) {
    throw InvalidInput("mixture needs one weight per mean");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("mixture weights must be nonnegative");
    }
  }
  if (std::abs(pairwise_sum(weights) - 1.0) > 1e-12) {
    throw InvalidInput("mixture weights must sum to 1");
  }
  for (const auto& m : means) {
    if (m.size() != means.front().size() || m.size() < 1 || !m.allFinite()) {
      throw InvalidInput("mixture means must share one finite dimension");
    }
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidInput("mixture variance must be > 0");
  }
  return TargetModel(
      GaussianMixture{std::move(weights), std::move(means), sigma2});
}

TargetModel TargetModel::mixture_1d(std::vector<double> weights,
                                    const std::vector<double>& means,
                                    double sigma2) {
  std::vector<Eigen::VectorXd> mus;
  for (double m : means) mus.push_back(Eigen::VectorXd::Constant(1, m));
  return mixture(std::move(weights), std::move(mus), sigma2);
}

TargetModel TargetModel::laplace(double mu, double b) {
  if (!std::isfinite(mu)) throw InvalidInput("laplace location not finite");
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw InvalidInput("laplace scale must be > 0");
  }
  return TargetModel(Laplace1D{mu, b});
}

TargetModel TargetModel::finite(FiniteDist probs) {
  return TargetModel(FiniteModel{std::move(probs)});
}

Eigen::Index TargetModel::dim() const {
  return std::visit(
      Overloaded{
          [](const GaussianDiag& g) { return g.mu.size(); },
          [](const GaussianMixture& g) { return g.means.front().size(); },
          [](const Laplace1D&) { return Eigen::Index{1}; },
          [](const FiniteModel&) { return Eigen::Index{1}; },
      },
      variant_);
}

TargetModel TargetModel::with_log_offset(double offset) const {
  TargetModel copy = *this;
  copy.log_offset_ = offset;
  return copy;
}

std::string TargetModel::to_string() const {
  using detail::format_double;
  auto join = [](auto begin, auto end, auto fmt) {
    std::string s;
    for (auto it = begin; it != end; ++it) {
      if (it != begin) s += ';';
      s += fmt(*it);
    }
    return s;
  };
  return std::visit(
      Overloaded{
          [&](const GaussianDiag& g) {
            return "gauss:mu=" +
                   join(g.mu.data(), g.mu.data() + g.mu.size(),
                        format_double) +
                   ",sigma2=" + format_double(g.sigma2);
          },
          [&](const GaussianMixture& g) {
            std::string s = "mix:w=" + join(g.weights.begin(), g.weights.end(),
                                            format_double);
            s += ",mu=" + join(g.means.begin(), g.means.end(),
                               [](const Eigen::VectorXd& v) {
                                 return detail::format_double(v[0]);
                               });
            return s + ",sigma2=" + format_double(g.sigma2);
          },
          [&](const Laplace1D& l) {
            return "laplace:mu=" + format_double(l.mu) +
                   ",b=" + format_double(l.b);
          },
          [&](const FiniteModel& f) {
            return "finite:p=" + join(f.probs.probs().begin(),
                                      f.probs.probs().end(), format_double);
          },
      },
      variant_);
}

TargetModel parse_model(std::string_view text) {
  using namespace detail;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("model descriptor needs 'name:params', got '" +
                       std::string(text) + "'");
  }
  const auto name = text.substr(0, colon);
  const auto kv = parse_key_values(text.substr(colon + 1), name);
  if (name == "gauss") {
    reject_unknown_keys(kv, {"mu", "sigma2"}, name);
    const auto mu = parse_list(require_key(kv, "mu", name), ';', "mu");
    return TargetModel::gaussian(
        Eigen::Map<const Eigen::VectorXd>(mu.data(),
                                          static_cast<Eigen::Index>(mu.size())),
        parse_double(require_key(kv, "sigma2", name), "sigma2"));
  }
  if (name == "laplace") {
    reject_unknown_keys(kv, {"mu", "b"}, name);
    return TargetModel::laplace(
        parse_double(require_key(kv, "mu", name), "mu"),
        parse_double(require_key(kv, "b", name), "b"));
  }
  if (name == "mix") {
    reject_unknown_keys(kv, {"w", "mu", "sigma2"}, name);
    return TargetModel::mixture_1d(
        parse_list(require_key(kv, "w", name), ';', "w"),
        parse_list(require_key(kv, "mu", name), ';', "mu"),
        parse_double(require_key(kv, "sigma2", name), "sigma2"));
  }
  if (name == "finite") {
    reject_unknown_keys(kv, {"p"}, name);
    return TargetModel::finite(
        FiniteDist(parse_list(require_key(kv, "p", name), ';', "p")));
  }
  throw InvalidInput("unknown model '" + std::string(name) + "'");
}

// --- sampling and densities -------------------------------------------------

Sample sample(const TargetModel& model, Eigen::Index n, RngStream& rng) {
  if (n < 1) throw InvalidInput("sample size must be >= 1");
  const Eigen::Index d = model.dim();
  RowMatrix data(n, d);
  auto& eng = rng.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::visit(
      Overloaded{
          [&](const GaussianDiag& g) {
            const double sd = std::sqrt(g.sigma2);
            for (Eigen::Index i = 0; i < n; ++i) {
              for (Eigen::Index k = 0; k < d; ++k) {
                data(i, k) = g.mu[k] + sd * normal(eng);
              }
            }
          },
          [&](const GaussianMixture& g) {
            const double sd = std::sqrt(g.sigma2);
            std::discrete_distribution<int> pick(g.weights.begin(),
                                                 g.weights.end());
            for (Eigen::Index i = 0; i < n; ++i) {
              const auto& mu = g.means[static_cast<std::size_t>(pick(eng))];
              for (Eigen::Index k = 0; k < d; ++k) {
                data(i, k) = mu[k] + sd * normal(eng);
              }
            }
          },
          [&](const Laplace1D& l) {
            std::exponential_distribution<double> expo(1.0);
            std::bernoulli_distribution coin(0.5);
            for (Eigen::Index i = 0; i < n; ++i) {
              const double e = expo(eng);
              data(i, 0) = coin(eng) ? l.mu + l.b * e : l.mu - l.b * e;
            }
          },
          [&](const FiniteModel& f) {
            std::discrete_distribution<int> pick(f.probs.probs().begin(),
                                                 f.probs.probs().end());
            for (Eigen::Index i = 0; i < n; ++i) data(i, 0) = pick(eng);
          },
      },
      model.variant());
  return Sample(std::move(data),
                SeedLineage{true, rng.master_seed(), rng.stream_id()});
}

double log_density(const TargetModel& model, Point x) {
  return normalized_log_density(model, x) + model.log_offset();
}

Eigen::VectorXd score(const TargetModel& model, Point x) {
  check_dim(model, x);
  return std::visit(
      Overloaded{
          [&](const GaussianDiag& g) -> Eigen::VectorXd {
            return -(x - g.mu) / g.sigma2;
          },
          [&](const GaussianMixture& g) -> Eigen::VectorXd {
            // Responsibility-weighted component scores.
            std::vector<double> logw(g.weights.size());
            for (std::size_t k = 0; k < g.weights.size(); ++k) {
              logw[k] = std::log(g.weights[k]) +
                        gaussian_log_pdf(x, g.means[k], g.sigma2);
            }
            const double norm = log_sum_exp(logw);
            Eigen::VectorXd s = Eigen::VectorXd::Zero(x.size());
            for (std::size_t k = 0; k < g.weights.size(); ++k) {
              const double r = std::exp(logw[k] - norm);
              if (r > 0.0) s -= r * (x - g.means[k]) / g.sigma2;
            }
            return s;
          },
          [&](const Laplace1D& l) -> Eigen::VectorXd {
            const double diff = x[0] - l.mu;
            const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            return Eigen::VectorXd::Constant(1, -sgn / l.b);
          },
          [&](const FiniteModel&) -> Eigen::VectorXd {
            throw Unsupported("finite models have no score function");
          },
      },
      model.variant());
}

// --- kernel embeddings ------------------------------------------------------

double mean_embedding_dot(const TargetModel& model, const KernelSpec& spec,
                          Point x) {
  check_dim(model, x);
  if (const auto* f = std::get_if<FiniteModel>(&model.variant())) {
    if (!std::holds_alternative<DeltaKernel>(spec.variant())) {
      no_closed_form(model, spec);
    }
    return f->probs[symbol_of(*f, x)];
  }
  const auto* g = std::get_if<GaussianKernel>(&spec.variant());
  const auto comps = as_components(model);
  if (!g || !comps) no_closed_form(model, spec);
  const double v = g->w + comps->sigma2;
  const double scale = std::pow(g->w / v, static_cast<double>(x.size()) / 2.0);
  std::vector<double> terms(comps->weights.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    terms[k] = comps->weights[k] * scale *
               std::exp(-(x - comps->means[k]).squaredNorm() / (2.0 * v));
  }
  return pairwise_sum(terms);
}

double cross_embedding(const TargetModel& P, const TargetModel& Q,
                       const KernelSpec& spec) {
  if (P.dim() != Q.dim()) throw InvalidInput("model dimensions differ");
  const auto* fp = std::get_if<FiniteModel>(&P.variant());
  const auto* fq = std::get_if<FiniteModel>(&Q.variant());
  if (fp && fq && std::holds_alternative<DeltaKernel>(spec.variant())) {
    if (fp->probs.size() != fq->probs.size()) {
      throw InvalidInput("finite models have different alphabets");
    }
    std::vector<double> terms(fp->probs.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      terms[i] = fp->probs[i] * fq->probs[i];
    }
    return pairwise_sum(terms);
  }
  const auto* g = std::get_if<GaussianKernel>(&spec.variant());
  const auto cp = as_components(P);
  const auto cq = as_components(Q);
  if (!g) no_closed_form(P, spec);
  if (!cp) no_closed_form(P, spec);
  if (!cq) no_closed_form(Q, spec);
  std::vector<double> terms;
  terms.reserve(cp->weights.size() * cq->weights.size());
  for (std::size_t a = 0; a < cp->weights.size(); ++a) {
    for (std::size_t b = 0; b < cq->weights.size(); ++b) {
      terms.push_back(cp->weights[a] * cq->weights[b] *
                      gaussian_pair_embedding(cp->means[a], cp->sigma2,
                                              cq->means[b], cq->sigma2, g->w));
    }
  }
  return pairwise_sum(terms);
}

double embedding_norm_sq(const TargetModel& model, const KernelSpec& spec) {
  return cross_embedding(model, model, spec);
}

// --- divergences --------------------------------------------------------------

Window quadrature_window(const std::vector<const TargetModel*>& models) {
  Window w{std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           {}};
  for (const TargetModel* m : models) {
    if (m->dim() != 1 || !m->is_continuous()) {
      throw Unsupported("quadrature needs one-dimensional continuous models");
    }
    const double reach = 12.0 * component_sd(*m);
    std::visit(Overloaded{
                   [&](const GaussianDiag& g) {
                     w.lo = std::min(w.lo, g.mu[0] - reach);
                     w.hi = std::max(w.hi, g.mu[0] + reach);
                   },
                   [&](const GaussianMixture& g) {
                     for (const auto& mu : g.means) {
                       w.lo = std::min(w.lo, mu[0] - reach);
                       w.hi = std::max(w.hi, mu[0] + reach);
                     }
                   },
                   [&](const Laplace1D& l) {
                     w.lo = std::min(w.lo, l.mu - reach);
                     w.hi = std::max(w.hi, l.mu + reach);
                     w.kinks.push_back(l.mu);
                   },
                   [](const FiniteModel&) {},
               },
               m->variant());
  }
  return w;
}

double kld(const TargetModel& P, const TargetModel& Q) {
  const auto* fp = std::get_if<FiniteModel>(&P.variant());
  const auto* fq = std::get_if<FiniteModel>(&Q.variant());
  if (fp || fq) {
    if (!fp || !fq) {
      throw InvalidInput("kld between a finite and a continuous model");
    }
    return kl_divergence(fp->probs.probs(), fq->probs.probs());
  }
  if (P.dim() != Q.dim()) throw InvalidInput("model dimensions differ");
  const auto* gp = std::get_if<GaussianDiag>(&P.variant());
  const auto* gq = std::get_if<GaussianDiag>(&Q.variant());
  if (gp && gq) {
    const double d = static_cast<double>(gp->mu.size());
    const double ratio = gp->sigma2 / gq->sigma2;
    return 0.5 * d * (ratio - 1.0 - std::log(ratio)) +
           (gp->mu - gq->mu).squaredNorm() / (2.0 * gq->sigma2);
  }
  if (P.dim() != 1) {
    throw Unsupported("kld by quadrature supports one-dimensional models only");
  }
  const Window win = quadrature_window({&P, &Q});
  Eigen::VectorXd x(1);
  auto integrand = [&](double t) {
    x[0] = t;
    const double lp = normalized_log_density(P, x);
    if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lp) * (lp - normalized_log_density(Q, x));
  };
  const double v = integrate(integrand, win.lo, win.hi, 1e-6, win.kinks);
  return std::max(v, 0.0);
}

}  // namespace kuht
