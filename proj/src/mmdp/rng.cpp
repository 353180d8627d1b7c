#include "mathprep/mmdp/rng.hpp"

#include "mathprep/error.hpp"

namespace mathprep::mmdp {

std::size_t Rng::index(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "cannot draw from an empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % n);
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  if (probabilities.empty()) fail(ErrorCode::InvalidArgument, "cannot sample an empty distribution");
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace mathprep::mmdp
