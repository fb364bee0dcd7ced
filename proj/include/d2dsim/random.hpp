#pragma once

#include <cmath>
#include <random>

namespace d2dsim {

// Hand-rolled draws on top of mt19937_64 so streams are identical across
// standard library implementations.

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n). n must be positive.
inline int uniform_index(std::mt19937_64& rng, int n) {
  const int i = static_cast<int>(uniform01(rng) * n);
  return i < n ? i : n - 1;
}

// Standard normal via Box-Muller, two draws per sample.
inline double normal01(std::mt19937_64& rng) {
  const double u1 = std::max(uniform01(rng), 1e-300);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace d2dsim
