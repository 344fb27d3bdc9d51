// Copyright 2026 The qndsynth Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace qnd {

/// One round of the splitmix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of realization `index` in an ensemble: splitmix64(master ^ index).
/// This derivation is part of the reproducibility contract.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed ^ index);
}

/// Per-trajectory random stream. Owned by exactly one simulation thread.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits, identical on every
  /// platform (std::uniform_real_distribution is not).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

  std::uint64_t next() { return engine_(); }

  /// Standard normal via Box-Muller on uniform().
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace qnd
