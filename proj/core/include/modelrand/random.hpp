// Copyright 2026 The modelrand Authors
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

#ifndef MODELRAND_RANDOM_HPP_
#define MODELRAND_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

#include "modelrand/normal.hpp"

namespace modelrand {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based seed split: every Monte Carlo unit of work (a path, a trial)
// derives its own stream from the root seed and its indices, so results do
// not depend on scheduling or thread count.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p));
  return s;
}

// Deterministic generator with inverse-CDF samplers. Gaussian draws go
// through the same quantile routine as the transform, which keeps every
// stream reproducible across platforms (no reliance on the
// implementation-defined std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal(double mean = 0.0, double variance = 1.0) {
    return gaussian_icdf(uniform01(), mean, variance);
  }

  double laplace(double location, double scale) {
    const double u = uniform01();
    return u < 0.5 ? location + scale * std::log(2.0 * u)
                   : location - scale * std::log(2.0 * (1.0 - u));
  }

  double exponential(double rate) { return -std::log(1.0 - uniform01()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace modelrand

#endif  // MODELRAND_RANDOM_HPP_
