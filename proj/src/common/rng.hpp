// Copyright 2026 The MIENF Authors.
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
#include <random>

namespace mienf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive decorrelated stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream `stream` of a user-level seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x5851f42d4c957f2dULL)));
}

namespace streams {
inline constexpr std::uint64_t kData = 1;
inline constexpr std::uint64_t kMapping = 2;
inline constexpr std::uint64_t kOracle = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kShuffle = 5;
inline constexpr std::uint64_t kJitter = 6;
}  // namespace streams

}  // namespace mienf
