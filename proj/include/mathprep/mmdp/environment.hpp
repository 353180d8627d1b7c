#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathprep/memory/case_bank.hpp"
#include "mathprep/mmdp/rng.hpp"

namespace mathprep::mmdp {

/// A state of the memory-based MDP. The text rendering is what gets embedded.
struct EnvState {
  std::string text;
  memory::Annotations annotations;
  bool operator==(const EnvState&) const = default;
};

struct AgentAction {
  std::string text;
  memory::Annotations annotations;
  bool operator==(const AgentAction&) const = default;
};

/// Outcome of one transition; an empty `next` marks a terminal transition.
struct StepResult {
  std::optional<EnvState> next;
  double reward = 0.0;
};

/// Transition dynamics P and reward function R. Implementations must be
/// deterministic given the generator they are handed.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual EnvState initial_state(Rng& rng) = 0;
  virtual StepResult step(const EnvState& state, const AgentAction& action, Rng& rng) = 0;
};

/// Weights of the three reward signal classes; each >= 0, sum > 0.
struct CompositeRewardConfig {
  double quantitative = 1.0;
  double qualitative = 0.0;
  double binary = 0.0;
  /// Throws Error(Config).
  void check() const;
};

/// Weighted mean of the three components, normalized by the weight sum.
double composite_reward(double quantitative, double qualitative, double binary,
                        const CompositeRewardConfig& config);

}  // namespace mathprep::mmdp
