#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace adabo {

// Deterministic random source. All distribution transforms are implemented
// here instead of <random> distributions so that a fixed seed reproduces the
// same draw sequence on every compiler and standard library.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  // Stream derived from (seed, stream). Separate streams keep meta level
  // draws (optimizer selection) from disturbing the proposal draws, which is
  // what makes a portfolio of one reproduce the standalone run exactly.
  static RandomSource derive(std::uint64_t seed, std::uint64_t stream);

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased draw from the inclusive integer range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal, one variate per call (Box-Muller, cosine branch).
  double normal();

  // Index drawn proportionally to non-negative weights; the sum must be > 0.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer over the combined seed and stream id.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace adabo
