// Copyright 2026 The gain-index Authors. All rights reserved.
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

#ifndef UOI_RNG_HPP_
#define UOI_RNG_HPP_

#include <array>
#include <cstdint>

namespace uoi {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

// xoshiro256** seeded through SplitMix64.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  std::array<std::uint64_t, 4> s_;
};

// Generator of run `run` of an experiment seeded with `seed`.
inline Xoshiro256StarStar substream(std::uint64_t seed, std::uint64_t run) {
  return Xoshiro256StarStar(seed ^ run);
}

}  // namespace uoi

#endif  // UOI_RNG_HPP_
