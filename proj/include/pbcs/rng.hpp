#pragma once

// Random streams. Seeds are mixed with SplitMix64; each stream is a
// std::mt19937_64 (whose output sequence is fixed by the C++ standard).
// Gaussians use the Box-Muller transform, so every draw is reproducible
// across platforms given the seed.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace pbcs {

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Folds the parts into one 64-bit seed. Used to derive independent child
/// streams (per block, per cell) from a master seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  bool bernoulli(double p);
  /// Index drawn with probability proportional to weights.
  std::size_t discrete(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pbcs
