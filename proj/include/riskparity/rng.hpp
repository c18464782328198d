#pragma once

#include <cstdint>
#include <random>

namespace riskparity {

// All stochastic code draws through the helpers below instead of
// std::uniform_*_distribution, whose output is implementation-defined. With a
// fixed seed every draw is therefore bit-identical across standard libraries.
using Rng = std::mt19937_64;

// splitmix64 finalizer. Used to spread correlated inputs (base seed, run
// index) into statistically independent 64-bit seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for the index-th parallel run derived from a user-facing base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_range(Rng& g, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(g);
}

// Uniform integer in [0, n), n > 0. Multiply-shift keeps the mapping exact
// and reproducible without a division.
inline std::size_t uniform_below(Rng& g, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(g()) * n) >> 64);
}

}  // namespace riskparity
