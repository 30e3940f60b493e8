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

#ifndef KUHT_RNG_H_
#define KUHT_RNG_H_

#include <cstdint>
#include <random>

namespace kuht {

// SplitMix64 finalizer applied to a combination of two words.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

// A reproducible random stream identified by (master_seed, stream_id).
// Equal identifiers give bit-identical draws; distinct stream ids are
// decorrelated through mix64. Child streams are addressed by index so that
// replicate b of a bootstrap always sees the same draws no matter which
// thread computes it.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        engine_(mix64(master_seed, stream_id)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Independent stream keyed on this stream's identity and `index`.
  RngStream child(std::uint64_t index) const {
    return RngStream(mix64(master_seed_, stream_id_), index);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace kuht

#endif  // KUHT_RNG_H_
