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

#ifndef KUHT_QUADRATURE_H_
#define KUHT_QUADRATURE_H_

#include <functional>
#include <vector>

namespace kuht {

// Adaptive Gauss-Kronrod integral of f over [a, b], split at the given
// interior breakpoints (kinks). Throws QuadratureError when the estimated
// absolute error exceeds abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9,
                 const std::vector<double>& breakpoints = {});

}  // namespace kuht

#endif  // KUHT_QUADRATURE_H_
