#include "mathprep/mmdp/episode.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "mathprep/error.hpp"
#include "mathprep/retrieval/softmax.hpp"

namespace mathprep::mmdp {

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorCode::InvalidArgument, "gamma must lie in [0, 1)");
}

}  // namespace

Trajectory run_episode(Environment& env, CbrMemory& memory, const ActionProposer& proposer,
                       const EpisodeConfig& config, Rng& rng) {
  if (config.horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  check_gamma(config.gamma);
  Trajectory traj;
  traj.horizon = config.horizon;
  std::optional<EnvState> state = env.initial_state(rng);
  for (std::size_t t = 0; t < config.horizon && state; ++t) {
    TrajectoryStep step;
    step.state = *state;
    auto decision = cbr_action(*state, memory, config.retrieval, proposer, rng, config.selection);
    for (const auto& r : decision.retrieval.cases) {
      step.retrieved_ids.push_back(memory.bank().at(r.index).case_id);
    }
    step.mu = decision.retrieval.mu.empty() ? std::vector<double>{1.0} : decision.retrieval.mu;
    step.action = decision.action;
    step.action_probability = decision.probability;
    StepResult result;
    try {
      result = env.step(*state, decision.action, rng);
      if (!std::isfinite(result.reward)) fail(ErrorCode::Simulation, "non-finite reward");
    } catch (const std::exception& e) {
      traj.aborted = true;
      traj.abort_reason = e.what();
      break;
    }
    step.reward = result.reward;
    step.next_state = result.next;

    memory::Case c;
    c.case_id = config.case_prefix + "-" + std::to_string(memory.bank().next_seq());
    c.state_text = step.state.text;
    c.action_text = step.action.text;
    c.reward = step.reward;
    if (step.next_state) c.next_state_text = step.next_state->text;
    c.success = step.reward > 0.0;
    c.annotations = step.action.annotations;
    step.retained_case_id = memory.retain(std::move(c)).case_id;

    traj.steps.push_back(std::move(step));
    state = result.next;
  }
  if (config.record_returns) record_returns(traj, memory, config.gamma);
  return traj;
}

std::vector<double> returns_to_go(const Trajectory& trajectory, double gamma) {
  check_gamma(gamma);
  std::vector<double> g(trajectory.steps.size());
  double acc = 0.0;
  for (std::size_t i = trajectory.steps.size(); i-- > 0;) {
    acc = trajectory.steps[i].reward + gamma * acc;
    g[i] = acc;
  }
  return g;
}

void record_returns(const Trajectory& trajectory, CbrMemory& memory, double gamma) {
  const auto g = returns_to_go(trajectory, gamma);
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& step = trajectory.steps[t];
    const auto state = memory.embed(step.state.text);
    for (const auto& id : step.retrieved_ids) {
      memory.estimator().add_record(id, retrieval::Record{state, g[t]});
    }
    if (!step.retained_case_id.empty()) {
      memory.estimator().add_record(step.retained_case_id, retrieval::Record{state, g[t]});
    }
  }
}

double discounted_return(const Trajectory& trajectory, double gamma) {
  check_gamma(gamma);
  double sum = 0.0;
  double discount = 1.0;
  for (const auto& step : trajectory.steps) {
    sum += discount * step.reward;
    discount *= gamma;
  }
  return sum;
}

double entropy_regularized_return(const Trajectory& trajectory, double gamma, double alpha,
                                  bool discounted) {
  if (discounted) check_gamma(gamma);
  double sum = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& step = trajectory.steps[t];
    if (!step.mu || step.mu->empty()) {
      fail(ErrorCode::Contract, "step " + std::to_string(t) + " has no stored retrieval weights");
    }
    sum += discount * (step.reward + alpha * retrieval::entropy(*step.mu));
    if (discounted) discount *= gamma;
  }
  return sum;
}

namespace {

using nlohmann::ordered_json;

ordered_json text_json(const std::string& text, const memory::Annotations& annotations) {
  ordered_json j;
  j["text"] = text;
  j["annotations"] = annotations;
  return j;
}

EnvState state_from(const ordered_json& j) {
  return EnvState{j.at("text").get<std::string>(), j.at("annotations").get<memory::Annotations>()};
}

}  // namespace

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& s = trajectory.steps[t];
    ordered_json j;
    j["t"] = t;
    j["state"] = text_json(s.state.text, s.state.annotations);
    j["retrieved"] = s.retrieved_ids;
    j["mu"] = s.mu ? ordered_json(*s.mu) : ordered_json(nullptr);
    j["action"] = text_json(s.action.text, s.action.annotations);
    j["action_probability"] = s.action_probability;
    j["reward"] = s.reward;
    j["next_state"] = s.next_state ? text_json(s.next_state->text, s.next_state->annotations)
                                   : ordered_json(nullptr);
    j["retained"] = s.retained_case_id;
    j["horizon"] = trajectory.horizon;
    if (trajectory.aborted && t + 1 == trajectory.steps.size()) j["aborted"] = trajectory.abort_reason;
    out << j.dump() << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing trajectory");
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = ordered_json::parse(line);
      TrajectoryStep s;
      s.state = state_from(j.at("state"));
      s.retrieved_ids = j.at("retrieved").get<std::vector<std::string>>();
      if (!j.at("mu").is_null()) s.mu = j.at("mu").get<std::vector<double>>();
      auto a = state_from(j.at("action"));
      s.action = AgentAction{a.text, a.annotations};
      s.action_probability = j.at("action_probability").get<double>();
      s.reward = j.at("reward").get<double>();
      if (!j.at("next_state").is_null()) s.next_state = state_from(j.at("next_state"));
      s.retained_case_id = j.at("retained").get<std::string>();
      traj.horizon = j.at("horizon").get<std::size_t>();
      if (j.contains("aborted")) {
        traj.aborted = true;
        traj.abort_reason = j.at("aborted").get<std::string>();
      }
      traj.steps.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace mathprep::mmdp
