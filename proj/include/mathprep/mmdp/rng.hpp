#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mathprep::mmdp {

/// Explicit seeded generator threaded through every stochastic call.
/// Draws are derived from raw mt19937_64 output so sequences are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n). Throws Error(InvalidArgument) when n == 0.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Independent child stream; advances this generator by one draw.
  Rng fork() { return Rng(next() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF draw from a probability vector. The last positive entry
/// absorbs rounding slack.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

}  // namespace mathprep::mmdp
