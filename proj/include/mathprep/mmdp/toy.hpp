#pragma once

#include <array>
#include <string>
#include <vector>

#include "mathprep/mmdp/environment.hpp"
#include "mathprep/mmdp/policy.hpp"
#include "mathprep/retrieval/training.hpp"

namespace mathprep::mmdp {

inline constexpr const char* kAdvance = "advance";
inline constexpr const char* kStay = "stay";

/// Deterministic chain s0 -> s1 -> ... -> s_{n-1}. "advance" moves right and
/// pays 1 when leaving the last state (terminal); "stay" pays 0.
class ChainMdp final : public Environment {
 public:
  explicit ChainMdp(int length = 3);
  int length() const noexcept { return length_; }
  EnvState state(int position) const;
  /// Throws Error(Simulation) for a state this chain did not produce.
  int position(const EnvState& state) const;
  static std::vector<AgentAction> actions();

  EnvState initial_state(Rng& rng) override;
  StepResult step(const EnvState& state, const AgentAction& action, Rng& rng) override;

 private:
  int length_;
};

/// Two contexts by two arms with Bernoulli rewards; one step per episode.
class ContextualBandit final : public Environment {
 public:
  using Table = std::array<std::array<double, 2>, 2>;
  explicit ContextualBandit(Table success = {{{0.8, 0.2}, {0.3, 0.7}}});
  const Table& success() const noexcept { return success_; }
  EnvState context(int index) const;
  static std::vector<AgentAction> actions();

  EnvState initial_state(Rng& rng) override;
  StepResult step(const EnvState& state, const AgentAction& action, Rng& rng) override;

 private:
  Table success_;
};

/// Reuses the retrieved case's action with `reuse` probability, spreading
/// the rest uniformly; uniform when unconditioned.
class ReuseProposer final : public ActionProposer {
 public:
  ReuseProposer(std::vector<AgentAction> actions, double reuse = 0.9);
  std::vector<WeightedAction> propose(const EnvState& state,
                                      const memory::Case* retrieved) const override;

 private:
  std::vector<AgentAction> actions_;
  double reuse_;
};

/// One case per action for the chain, D_c seeded from exploring-start
/// Monte-Carlo rollouts (take c's action at s, then advance), and a TD
/// transition for every (state, case) pair.
struct ChainExperience {
  std::vector<std::string> case_ids;
  std::vector<retrieval::Transition> transitions;
};
/// Soft value iteration on the chain: V(s) = alpha log sum_a exp(Q(s,a) / alpha)
/// with Q(s,a) = r + gamma V(s'). Terminal successors contribute 0.
std::vector<double> chain_soft_values(const ChainMdp& env, double gamma, double alpha,
                                      int sweeps = 1000);

ChainExperience seed_chain(ChainMdp& env, CbrMemory& memory, double gamma,
                           std::size_t rollout_horizon = 8);

}  // namespace mathprep::mmdp
