#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace casimir {

// All stochastic components draw from this engine. Its output sequence is
// fixed by the C++ standard, and the helpers below avoid the
// implementation-defined <random> distributions, so seeded runs reproduce
// across standard libraries.
using Rng = std::mt19937_64;

inline constexpr int kRngVersion = 1;

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n) by rejection, n > 0.
inline std::size_t sample_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

// Standard normal via Box-Muller (one value per call).
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace casimir
