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

#ifndef KUHT_LARGE_DEVIATIONS_H_
#define KUHT_LARGE_DEVIATIONS_H_

#include <cstdint>
#include <vector>

#include "kuht/finite_dist.h"

namespace kuht {

// Empirical type of m draws on {0, ..., t-1}.
struct TypeVector {
  std::vector<int> counts;
  int m = 0;

  friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

inline constexpr double kMaxEnumeration = 1e7;

// C(m + t - 1, t - 1) as a double.
double type_count(int m, int t);

// All compositions of m into t parts in lexicographic order. Throws TooLarge
// past kMaxEnumeration types.
std::vector<TypeVector> enumerate_types(int m, int t);

// log of the multinomial probability of the type class of T under R; -inf
// when T puts mass where R has none.
double type_log_prob(const TypeVector& T, const FiniteDist& R);

struct TypeSandwich {
  double lower;  // (m+1)^{-t} exp(-m D(T/m || R))
  double exact;
  double upper;  // exp(-m D(T/m || R))
};

// Throws SupportViolation when T is not inside R's support.
TypeSandwich type_prob_sandwich(const TypeVector& T, const FiniteDist& R);

// Squared delta-kernel MMD between p and T/m.
double delta_mmd2(const FiniteDist& p, const TypeVector& T);

struct ExactErrors {
  double type1;
  double type2;
  double log_type1;  // -inf when type1 == 0
  double log_type2;
};

// Exact error probabilities of the delta-kernel test that accepts when
// d(P, T/n) <= gamma. type1 is computed under P, type2 under Q.
ExactErrors exact_error_probs(const FiniteDist& P, const FiniteDist& Q,
                              double gamma, int n);

// -log sum_i P_i^c Q_i^{1-c}; +inf for disjoint supports.
double dstar(const FiniteDist& P, const FiniteDist& Q, double c);

// Grid points {k / resolution} of the probability simplex in t dimensions.
std::vector<std::vector<double>> simplex_grid(int t, int resolution);

// min over the simplex grid of c D(R||P) + (1-c) D(R||Q).
double dstar_grid(const FiniteDist& P, const FiniteDist& Q, double c,
                  int resolution = 1000);

struct SanovReport {
  int n = 0;
  double gamma = 0.0;
  double log_prob = 0.0;  // log Prob_Q(Q_n in Gamma)
  double rate = 0.0;      // r_n = -log_prob / n
  double i_min = 0.0;     // grid infimum of D(.||Q) over the closed ball
  double i_type = 0.0;    // min over achievable types in the ball
  double type_slack = 0.0;  // t log(n+1) / n
  double grid_slack = 0.0;
  int grid_resolution = 0;
  bool vacuous = false;  // no achievable type in the ball
  bool lower_ok = false;
  bool upper_ok = false;

  bool holds() const { return vacuous || (lower_ok && upper_ok); }
};

// Gamma = {R : d(P, R) <= gamma} under the delta kernel, sampling from Q.
SanovReport sanov_sandwich_check(const FiniteDist& P, const FiniteDist& Q,
                                 double gamma, int n);

// True when consecutive rates never rise by more than `slack`.
bool rates_nonincreasing(const std::vector<SanovReport>& reports,
                         double slack = 1e-2);

struct ExtendedSanovReport {
  int m = 0;
  int n = 0;
  double gamma = 0.0;
  double c = 0.0;  // m / (m + n)
  double log_prob = 0.0;
  double rate = 0.0;  // -log_prob / (m + n)
  double j_min = 0.0;
  double j_type = 0.0;
  double type_slack = 0.0;  // t (log(m+1) + log(n+1)) / (m + n)
  double grid_slack = 0.0;
  int grid_resolution = 0;
  bool vacuous = false;
  bool lower_ok = false;
  bool upper_ok = false;

  bool holds() const { return vacuous || (lower_ok && upper_ok); }
};

// Gamma = {(R, S) : d(R, S) <= gamma}, with m draws from P and n from Q.
ExtendedSanovReport extended_sanov_check(const FiniteDist& P,
                                         const FiniteDist& Q, double gamma,
                                         int m, int n);

// Grid infimum of c D(R||P) + (1-c) D(S||Q) over pairs with d(R, S) <= gamma.
double extended_grid_infimum(const FiniteDist& P, const FiniteDist& Q,
                             double gamma, double c, int resolution);

}  // namespace kuht

#endif  // KUHT_LARGE_DEVIATIONS_H_
