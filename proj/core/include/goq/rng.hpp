#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace goq {

/// Seeded generator with portable output.
///
/// std::mt19937_64 produces a standardised bit stream, and every variate below
/// is derived from those bits by hand, so a (seed, call sequence) pair yields
/// the same numbers on any conforming standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  /// Standard normal by Box-Muller (one value per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Deterministic child seed for a named stage, so one top-level seed fans out
/// into independent reproducible streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

}  // namespace goq
