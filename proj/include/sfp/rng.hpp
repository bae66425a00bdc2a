#pragma once

#include <cmath>
#include <cstdint>

// Counter-based randomness built on the SplitMix64 finalizer. Every draw is
// a pure function of (seed, a, b), so streams can be split per run, per step
// and per player without shared state, and results do not depend on thread
// count or evaluation order.
//
// Conventions used across the project:
//   run seed for run r        = split(base_seed, r)
//   action draw, step n, i    = uniform(run_seed, n, i)
//   tensor entry t of a game  = uniform(seed, t, 0) / normal(seed, t)

namespace sfp::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream derivation: the r-th child seed of `base`.
constexpr std::uint64_t split(std::uint64_t base, std::uint64_t r) {
  return mix(base + kGamma * (r + 1));
}

// Keyed draw for the two-level counter (a, b).
constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b = 0) {
  return mix(mix(seed + kGamma * (a + 1)) + kGamma * (b + 1));
}

// Uniform on [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t a,
                      std::uint64_t b = 0) {
  return to_unit(draw(seed, a, b));
}

// Standard normal via Box-Muller; consumes sub-draws (a, 2b) and (a, 2b+1).
inline double normal(std::uint64_t seed, std::uint64_t a,
                     std::uint64_t b = 0) {
  constexpr double kTwoPi = 6.28318530717958647692;
  const double u1 =
      static_cast<double>((draw(seed, a, 2 * b) >> 11) + 1) * 0x1.0p-53;
  const double u2 = to_unit(draw(seed, a, 2 * b + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace sfp::rng
