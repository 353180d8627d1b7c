#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mathprep/mmdp/episode.hpp"
#include "mathprep/retrieval/training.hpp"

namespace mathprep::mmdp {

struct TdTrainingConfig {
  std::size_t updates = 5000;
  std::size_t batch_size = 0;  // 0 uses the full batch every update
  std::uint64_t seed = 0;
  double stop_loss = 0.0;  // stop once the batch loss falls below this
};

struct TdTrainingResult {
  std::vector<double> losses;
  std::size_t updates = 0;
};

/// Repeated td_update calls; minibatches are drawn with the seeded generator.
TdTrainingResult train_td(retrieval::QEstimator& estimator,
                          std::span<const retrieval::Transition> transitions,
                          const TdTrainingConfig& config);

/// TD samples from a recorded trajectory: (s_t, retained case, r_t, s_{t+1})
/// with the cases retrieved at s_{t+1} as backup candidates. Steps whose
/// successor had no retrieval fall back to the case retained there.
std::vector<retrieval::Transition> transitions_from(const Trajectory& trajectory,
                                                    const CbrMemory& memory);

}  // namespace mathprep::mmdp
