// Copyright (c) 2026 fdbench contributors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fdb {

using Seed = std::uint64_t;

// 64-bit FNV-1a over UTF-8 bytes.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Trial seeds are a pure function of (master seed, identity id, kind label),
// hashed from the string "master|identity|kind", so any run can be replayed
// from the master seed alone.
inline Seed derive_seed(Seed master, std::string_view identity,
                        std::string_view kind_label) {
  std::string s = std::to_string(master);
  s += '|';
  s += identity;
  s += '|';
  s += kind_label;
  return fnv1a64(s);
}

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Sequential splitmix64 generator. One instance per call site; never shared
// across threads.
class SplitMix64 {
 public:
  explicit SplitMix64(Seed seed) : state_(seed) {}

  std::uint64_t next() { return splitmix_mix(state_ += kSplitMixGamma); }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply keeps the draw branch
  // free and deterministic.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Stateless draw i of the stream `seed`. Parallel loops index draws by
// element position, so output never depends on thread count or order.
constexpr std::uint64_t hash_at(Seed seed, std::uint64_t i) {
  return splitmix_mix(seed + (i + 1) * kSplitMixGamma);
}

constexpr double unit_at(Seed seed, std::uint64_t i) {
  return static_cast<double>(hash_at(seed, i) >> 11) * 0x1.0p-53;
}

}  // namespace fdb
