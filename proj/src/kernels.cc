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

#include "kuht/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kuht/error.h"
#include "kuht/numeric.h"
#include "parse_util.h"

namespace kuht {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw InvalidInput("dimension mismatch: " + std::to_string(a) + " vs " +
                       std::to_string(b));
  }
}

double squared_distance(Point x, Point y) {
  check_same_dim(x.size(), y.size());
  double r2 = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double diff = y[k] - x[k];
    r2 += diff * diff;
  }
  return r2;
}

const GaussianKernel* as_gaussian(const KernelSpec& spec) {
  return std::get_if<GaussianKernel>(&spec.variant());
}
const ImqKernel* as_imq(const KernelSpec& spec) {
  return std::get_if<ImqKernel>(&spec.variant());
}

void require_differentiable(const KernelSpec& spec) {
  if (!spec.is_differentiable()) {
    throw Unsupported("kernel derivatives need a gaussian or imq kernel, got " +
                      spec.to_string());
  }
}

}  // namespace

// --- Sample -----------------------------------------------------------------

Sample::Sample(RowMatrix data, SeedLineage lineage)
    : data_(std::move(data)), lineage_(lineage) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidInput("sample must have n >= 1 and d >= 1");
  }
  if (!data_.allFinite()) throw InvalidInput("sample has non-finite entries");
}

Sample Sample::from_values(std::span<const double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return Sample(std::move(m));
}

Sample Sample::from_values(std::initializer_list<double> values) {
  return from_values(std::span<const double>(values.begin(), values.size()));
}

Sample Sample::subset(std::span<const Eigen::Index> rows) const {
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), d());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = data_.row(rows[i]);
  }
  return Sample(std::move(m), lineage_);
}

Sample concat(const Sample& a, const Sample& b) {
  check_same_dim(a.d(), b.d());
  RowMatrix m(a.n() + b.n(), a.d());
  m.topRows(a.n()) = a.data();
  m.bottomRows(b.n()) = b.data();
  return Sample(std::move(m));
}

// --- KernelSpec ---------------------------------------------------------------

KernelSpec KernelSpec::gaussian(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw InvalidInput("gaussian bandwidth must be > 0");
  }
  return KernelSpec(GaussianKernel{w});
}

KernelSpec KernelSpec::imq(double c, double eta) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidInput("imq scale c must be > 0");
  }
  if (!(eta > -1.0 && eta < 0.0)) {
    throw InvalidInput("imq exponent eta must lie in (-1, 0)");
  }
  return KernelSpec(ImqKernel{c, eta});
}

KernelSpec KernelSpec::delta(int t) {
  if (t < 2) throw InvalidInput("delta kernel alphabet size must be >= 2");
  return KernelSpec(DeltaKernel{t});
}

KernelSpec KernelSpec::family(std::vector<double> bandwidths) {
  if (bandwidths.empty()) throw InvalidInput("kernel family is empty");
  for (double w : bandwidths) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidInput("family bandwidths must be > 0");
    }
  }
  return KernelSpec(KernelFamily{std::move(bandwidths)});
}

double KernelSpec::bound() const {
  return std::visit(
      Overloaded{
          [](const GaussianKernel&) { return 1.0; },
          [](const ImqKernel& k) { return std::pow(k.c, 2.0 * k.eta); },
          [](const DeltaKernel&) { return 1.0; },
          [](const KernelFamily&) { return 1.0; },
      },
      variant_);
}

std::vector<KernelSpec> KernelSpec::members() const {
  if (const auto* f = std::get_if<KernelFamily>(&variant_)) {
    std::vector<KernelSpec> out;
    out.reserve(f->bandwidths.size());
    for (double w : f->bandwidths) out.push_back(gaussian(w));
    return out;
  }
  return {*this};
}

std::string KernelSpec::to_string() const {
  using detail::format_double;
  return std::visit(
      Overloaded{
          [](const GaussianKernel& k) {
            return "gaussian:w=" + format_double(k.w);
          },
          [](const ImqKernel& k) {
            return "imq:c=" + format_double(k.c) +
                   ",eta=" + format_double(k.eta);
          },
          [](const DeltaKernel& k) {
            return "delta:t=" + std::to_string(k.t);
          },
          [](const KernelFamily& k) {
            std::string s = "family:gaussian:w=";
            for (std::size_t i = 0; i < k.bandwidths.size(); ++i) {
              if (i) s += ';';
              s += format_double(k.bandwidths[i]);
            }
            return s;
          },
      },
      variant_);
}

KernelSpec parse_kernel(std::string_view text) {
  using namespace detail;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("kernel descriptor needs 'name:params', got '" +
                       std::string(text) + "'");
  }
  const auto name = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  if (name == "family") {
    constexpr std::string_view prefix = "gaussian:w=";
    if (rest.substr(0, prefix.size()) != prefix) {
      throw InvalidInput("family descriptor must read family:gaussian:w=a;b;..");
    }
    return KernelSpec::family(
        parse_list(rest.substr(prefix.size()), ';', "family bandwidth"));
  }
  const auto kv = parse_key_values(rest, name);
  if (name == "gaussian") {
    reject_unknown_keys(kv, {"w"}, name);
    return KernelSpec::gaussian(parse_double(require_key(kv, "w", name), "w"));
  }
  if (name == "imq") {
    reject_unknown_keys(kv, {"c", "eta"}, name);
    return KernelSpec::imq(parse_double(require_key(kv, "c", name), "c"),
                           parse_double(require_key(kv, "eta", name), "eta"));
  }
  if (name == "delta") {
    reject_unknown_keys(kv, {"t"}, name);
    return KernelSpec::delta(
        static_cast<int>(parse_int(require_key(kv, "t", name), "t")));
  }
  throw InvalidInput("unknown kernel '" + std::string(name) + "'");
}

// --- pointwise evaluation -----------------------------------------------------

double eval_kernel(const KernelSpec& spec, Point x, Point y) {
  const double r2 = squared_distance(x, y);
  return std::visit(
      Overloaded{
          [r2](const GaussianKernel& k) { return std::exp(-r2 / (2.0 * k.w)); },
          [r2](const ImqKernel& k) { return std::pow(k.c * k.c + r2, k.eta); },
          [r2](const DeltaKernel&) { return r2 == 0.0 ? 1.0 : 0.0; },
          [](const KernelFamily&) -> double {
            throw InvalidInput(
                "eval_kernel does not accept a kernel family; evaluate the "
                "members and take the sup of the statistic");
          },
      },
      spec.variant());
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Sample& X,
                     const Sample& Y) {
  check_same_dim(X.d(), Y.d());
  Eigen::MatrixXd G(X.n(), Y.n());
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    for (Eigen::Index j = 0; j < Y.n(); ++j) {
      G(i, j) = eval_kernel(spec, X.point(i), Y.point(j));
    }
  }
  return G;
}

Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, Point x, Point y) {
  require_differentiable(spec);
  const double r2 = squared_distance(x, y);
  const Eigen::VectorXd diff = x - y;
  if (const auto* g = as_gaussian(spec)) {
    const double k = std::exp(-r2 / (2.0 * g->w));
    return -(k / g->w) * diff;
  }
  const auto* m = as_imq(spec);
  const double u = m->c * m->c + r2;
  return (2.0 * m->eta * std::pow(u, m->eta - 1.0)) * diff;
}

double kernel_trace_grad_xy(const KernelSpec& spec, Point x, Point y) {
  require_differentiable(spec);
  const double r2 = squared_distance(x, y);
  const double d = static_cast<double>(x.size());
  if (const auto* g = as_gaussian(spec)) {
    const double k = std::exp(-r2 / (2.0 * g->w));
    return (d / g->w - r2 / (g->w * g->w)) * k;
  }
  // d/dy_i of 2 eta u^(eta-1) (x_i - y_i), summed over i.
  const auto* m = as_imq(spec);
  const double u = m->c * m->c + r2;
  return -4.0 * m->eta * (m->eta - 1.0) * std::pow(u, m->eta - 2.0) * r2 -
         2.0 * m->eta * d * std::pow(u, m->eta - 1.0);
}

double median_bandwidth(const Sample& X) {
  const Eigen::Index n = X.n();
  if (n < 2) throw InvalidInput("median heuristic needs n >= 2");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dists.push_back(squared_distance(X.point(i), X.point(j)));
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), dists.begin() + mid);
    median = 0.5 * (lower + median);
  }
  if (median > 0.0) return median / 2.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (double v : dists) {
    if (v > 0.0) smallest = std::min(smallest, v);
  }
  if (!std::isfinite(smallest)) {
    throw DegenerateSample("median heuristic: all points are identical");
  }
  return smallest / 2.0;
}

// --- batch sums ---------------------------------------------------------------

void kernel_row(const KernelSpec& spec, Point x, const Sample& Z,
                Eigen::Index begin, Eigen::Index end, Eigen::ArrayXd& out) {
  check_same_dim(x.size(), Z.d());
  const Eigen::Index len = end - begin;
  const Eigen::Index d = Z.d();
  out.resize(len);
  if (len <= 0) return;
  const double* base = Z.data().data() + begin * d;
  if (d == 1) {
    out = (Eigen::Map<const Eigen::ArrayXd>(base, len) - x[0]).square();
  } else {
    out.setZero();
    for (Eigen::Index k = 0; k < d; ++k) {
      Eigen::Map<const Eigen::ArrayXd, 0, Eigen::InnerStride<>> col(
          base + k, len, Eigen::InnerStride<>(d));
      out += (col - x[k]).square();
    }
  }
  std::visit(Overloaded{
                 [&out](const GaussianKernel& k) {
                   out = (-out / (2.0 * k.w)).exp();
                 },
                 [&out](const ImqKernel& k) {
                   out = (out + k.c * k.c).pow(k.eta);
                 },
                 [&out](const DeltaKernel&) {
                   out = (out == 0.0).cast<double>();
                 },
                 [](const KernelFamily&) {
                   throw InvalidInput("kernel_row does not accept a family");
                 },
             },
             spec.variant());
}

WithinSums kernel_within_sums(const KernelSpec& spec, const Sample& X) {
  const Eigen::Index n = X.n();
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  Eigen::ArrayXd buf;
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel_row(spec, X.point(i), X, i + 1, n, buf);
    rows[static_cast<std::size_t>(i)] = buf.sum();
    diag[static_cast<std::size_t>(i)] =
        eval_kernel(spec, X.point(i), X.point(i));
  }
  return {2.0 * pairwise_sum(rows), pairwise_sum(diag)};
}

namespace {

// True when a should index the outer loop of a cross sum. Picks the smaller
// sample, breaking ties by content, so that swapping arguments reproduces
// the same floating-point sum.
bool outer_first(const Sample& a, const Sample& b) {
  if (a.n() != b.n()) return a.n() < b.n();
  const auto& da = a.data();
  const auto& db = b.data();
  return std::lexicographical_compare(da.data(), da.data() + da.size(),
                                      db.data(), db.data() + db.size()) ||
         !std::lexicographical_compare(db.data(), db.data() + db.size(),
                                       da.data(), da.data() + da.size());
}

}  // namespace

double kernel_cross_sum(const KernelSpec& spec, const Sample& X,
                        const Sample& Y) {
  check_same_dim(X.d(), Y.d());
  const Sample& outer = outer_first(X, Y) ? X : Y;
  const Sample& inner = (&outer == &X) ? Y : X;
  std::vector<double> rows(static_cast<std::size_t>(outer.n()));
  Eigen::ArrayXd buf;
  for (Eigen::Index i = 0; i < outer.n(); ++i) {
    kernel_row(spec, outer.point(i), inner, 0, inner.n(), buf);
    rows[static_cast<std::size_t>(i)] = buf.sum();
  }
  return pairwise_sum(rows);
}

GramFactor pivoted_cholesky(const KernelSpec& spec, const Sample& Z,
                            double tol) {
  const Eigen::Index N = Z.n();
  GramFactor f;
  f.diagonal.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    f.diagonal[i] = eval_kernel(spec, Z.point(i), Z.point(i));
  }
  Eigen::VectorXd residual = f.diagonal;
  Eigen::MatrixXd L(N, std::min<Eigen::Index>(N, 64));
  Eigen::Index rank = 0;
  Eigen::ArrayXd col;
  while (rank < N) {
    Eigen::Index p = 0;
    const double pivot = residual.maxCoeff(&p);
    if (pivot <= tol) break;
    if (rank == L.cols()) {
      L.conservativeResize(N, std::min<Eigen::Index>(N, 2 * L.cols()));
    }
    kernel_row(spec, Z.point(p), Z, 0, N, col);
    Eigen::VectorXd c = col.matrix();
    if (rank > 0) {
      c.noalias() -= L.leftCols(rank) * L.row(p).head(rank).transpose();
    }
    c /= std::sqrt(pivot);
    L.col(rank) = c;
    residual -= c.cwiseAbs2();
    residual[p] = 0.0;
    residual = residual.cwiseMax(0.0);
    ++rank;
  }
  f.L = L.leftCols(rank);
  f.residual_trace = residual.sum();
  return f;
}

}  // namespace kuht
