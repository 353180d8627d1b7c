#include "mathprep/mmdp/learning.hpp"

#include "mathprep/error.hpp"

namespace mathprep::mmdp {

TdTrainingResult train_td(retrieval::QEstimator& estimator,
                          std::span<const retrieval::Transition> transitions,
                          const TdTrainingConfig& config) {
  if (transitions.empty()) fail(ErrorCode::InvalidArgument, "no transitions to train on");
  TdTrainingResult out;
  Rng rng(config.seed);
  std::vector<retrieval::Transition> batch;
  for (std::size_t u = 0; u < config.updates; ++u) {
    std::span<const retrieval::Transition> view = transitions;
    if (config.batch_size > 0 && config.batch_size < transitions.size()) {
      batch.clear();
      for (std::size_t i = 0; i < config.batch_size; ++i) {
        batch.push_back(transitions[rng.index(transitions.size())]);
      }
      view = batch;
    }
    auto result = retrieval::td_update(estimator, view);
    out.losses.push_back(result.loss);
    ++out.updates;
    if (result.loss < config.stop_loss) break;
  }
  return out;
}

std::vector<retrieval::Transition> transitions_from(const Trajectory& trajectory,
                                                    const CbrMemory& memory) {
  std::vector<retrieval::Transition> out;
  const auto& steps = trajectory.steps;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    retrieval::Transition tr;
    tr.state = memory.embed(steps[t].state.text);
    tr.case_id = steps[t].retained_case_id;
    tr.reward = steps[t].reward;
    if (steps[t].next_state) {
      tr.next_state = memory.embed(steps[t].next_state->text);
      if (t + 1 < steps.size()) {
        tr.next_candidates = steps[t + 1].retrieved_ids;
        if (tr.next_candidates.empty()) tr.next_candidates.push_back(steps[t + 1].retained_case_id);
      } else {
        // Truncated by the horizon: bootstrap from the case retained here.
        tr.next_candidates.push_back(steps[t].retained_case_id);
      }
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace mathprep::mmdp
