/*
 Copyright 2026 The COP Planner Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef COP_RNG_HPP
#define COP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace cop {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream: splitmix64(splitmix64(master) ^ stream).
/// Every random draw in the toolkit is made from a generator seeded this
/// way, so a master seed fixes all of them.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ stream);
}

/// Stream identifiers.
namespace stream {
inline constexpr std::uint64_t kPrecondition = 1;
inline constexpr std::uint64_t kTargets = 2;
inline constexpr std::uint64_t kFlights = 0x100;      ///< + flight index
inline constexpr std::uint64_t kMeasurements = 0x3;
}  // namespace stream

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream_id) {
  return Rng(derive_seed(master, stream_id));
}

/// Uniform draw in [lo, hi) from the raw 53 high bits of the generator;
/// unlike std::uniform_real_distribution its output does not depend on the
/// standard library implementation.
inline double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Standard normal draw (Box-Muller on two uniforms), implementation-independent.
inline double standard_normal(Rng& rng) {
  double u1 = uniform(rng, 0.0, 1.0);
  while (u1 <= 0.0) u1 = uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cop

#endif  // COP_RNG_HPP
