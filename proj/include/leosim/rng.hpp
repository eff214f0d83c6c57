// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random-stream utilities. Every Monte Carlo consumer derives
// an independent engine from (master seed, stream index), so results do not
// depend on thread scheduling or evaluation order.

#ifndef LEOSIM_RNG_HPP
#define LEOSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace leosim {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Engine for substream `stream` of master seed `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Two independent N(0,1) samples (Marsaglia polar, no libstdc++
/// distribution state involved, so the sequence is implementation-stable).
inline std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    const double u = unit(rng);
    const double v = unit(rng);
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double f = std::sqrt(-2.0 * std::log(s) / s);
      return {u * f, v * f};
    }
  }
}

}  // namespace leosim

#endif  // LEOSIM_RNG_HPP
