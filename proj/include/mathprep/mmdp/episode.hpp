#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mathprep/mmdp/policy.hpp"

namespace mathprep::mmdp {

struct TrajectoryStep {
  EnvState state;
  std::vector<std::string> retrieved_ids;
  std::optional<std::vector<double>> mu;  // empty retrieval stores {1}
  AgentAction action;
  double action_probability = 0.0;
  double reward = 0.0;
  std::optional<EnvState> next_state;  // empty when terminal
  std::string retained_case_id;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::size_t horizon = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct EpisodeConfig {
  retrieval::RetrievalConfig retrieval;
  double gamma = 0.9;
  std::size_t horizon = 10;
  Selection selection = Selection::Sample;
  std::string case_prefix = "case";
  /// Append Monte-Carlo return records to D_c after the episode.
  bool record_returns = true;
};

/// Retrieve, act, evaluate through env.step, retain (s, a, r, s') each step.
/// The bank grows by exactly the number of executed steps. A step that
/// throws aborts the episode and flags the partial trajectory.
Trajectory run_episode(Environment& env, CbrMemory& memory, const ActionProposer& proposer,
                       const EpisodeConfig& config, Rng& rng);

/// G_t = sum_{k >= t} gamma^(k - t) r_k for every step.
std::vector<double> returns_to_go(const Trajectory& trajectory, double gamma);

/// Monte-Carlo population of D_c: each step adds (embed(s_t), G_t) to every
/// case retrieved at s_t and to the case retained at s_t.
void record_returns(const Trajectory& trajectory, CbrMemory& memory, double gamma);

/// sum_t gamma^t r_t. Throws Error(InvalidArgument) unless gamma in [0, 1).
double discounted_return(const Trajectory& trajectory, double gamma);

/// sum_t d_t (r_t + alpha H(mu_t)) with d_t = 1, or gamma^t when discounted.
/// Throws Error(Contract) when a step has no stored mu.
double entropy_regularized_return(const Trajectory& trajectory, double gamma, double alpha,
                                  bool discounted = false);

/// JSON Lines, one step per line including mu.
void write_trajectory(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory(std::istream& in);

}  // namespace mathprep::mmdp
