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

#ifndef KUHT_ERROR_H_
#define KUHT_ERROR_H_

#include <stdexcept>
#include <string>

namespace kuht {

// All library failures derive from Error so callers (the CLI in particular)
// can map them to a single runtime exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatch, n too small, alpha out of range,
// unparsable descriptor strings.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Sample whose points are all identical where spread is required.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this kernel or model variant.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// No closed-form kernel embedding for the (model, kernel) pair.
class NoClosedForm : public Error {
 public:
  using Error::Error;
};

// Enumeration or grid would exceed its size guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// A numerical result that can only come from a bug (e.g. a biased MMD
// estimate that is clearly negative).
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

// Log-density is -inf at an observed point.
class SupportViolation : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace kuht

#endif  // KUHT_ERROR_H_
