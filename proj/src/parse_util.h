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

#ifndef KUHT_SRC_PARSE_UTIL_H_
#define KUHT_SRC_PARSE_UTIL_H_

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kuht/error.h"

namespace kuht::detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_double(std::string_view s, std::string_view what) {
  // from_chars rejects a leading '+' and accepts ".5" only as of C++17 rules,
  // so strip the sign manually to accept "+0.5".
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidInput("cannot parse number '" + std::string(s) + "' for " +
                       std::string(what));
  }
  return v;
}

inline long long parse_int(std::string_view s, std::string_view what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidInput("cannot parse integer '" + std::string(s) + "' for " +
                       std::string(what));
  }
  return v;
}

inline std::vector<double> parse_list(std::string_view s, char sep,
                                      std::string_view what) {
  std::vector<double> out;
  for (auto part : split(s, sep)) out.push_back(parse_double(part, what));
  return out;
}

// "a=1,b=2" -> {a:"1", b:"2"}; duplicate or malformed keys are errors.
inline std::map<std::string, std::string, std::less<>> parse_key_values(
    std::string_view s, std::string_view what) {
  std::map<std::string, std::string, std::less<>> out;
  if (s.empty()) return out;
  for (auto part : split(s, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw InvalidInput("expected key=value in " + std::string(what) +
                         " descriptor, got '" + std::string(part) + "'");
    }
    auto [it, inserted] = out.emplace(std::string(part.substr(0, eq)),
                                      std::string(part.substr(eq + 1)));
    if (!inserted) {
      throw InvalidInput("duplicate key '" + it->first + "' in " +
                         std::string(what) + " descriptor");
    }
  }
  return out;
}

template <typename Map>
std::string_view require_key(const Map& kv, std::string_view key,
                             std::string_view what) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw InvalidInput("missing '" + std::string(key) + "' in " +
                       std::string(what) + " descriptor");
  }
  return it->second;
}

template <typename Map>
void reject_unknown_keys(const Map& kv,
                         std::initializer_list<std::string_view> allowed,
                         std::string_view what) {
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) {
      throw InvalidInput("unknown key '" + k + "' in " + std::string(what) +
                         " descriptor");
    }
  }
}

// Shortest round-trip representation.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace kuht::detail

#endif  // KUHT_SRC_PARSE_UTIL_H_
