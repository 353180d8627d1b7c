#include "mathprep/mmdp/toy.hpp"

#include <algorithm>
#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::mmdp {

ChainMdp::ChainMdp(int length) : length_(length) {
  if (length < 1) fail(ErrorCode::InvalidArgument, "chain length must be >= 1");
}

EnvState ChainMdp::state(int position) const {
  if (position < 0 || position >= length_) fail(ErrorCode::Simulation, "chain position out of range");
  return EnvState{"chain position " + std::to_string(position) + " with " +
                      std::to_string(length_ - position) + " moves to the goal",
                  {{"position", std::to_string(position)}}};
}

int ChainMdp::position(const EnvState& s) const {
  auto it = s.annotations.find("position");
  if (it == s.annotations.end()) fail(ErrorCode::Simulation, "state carries no chain position");
  int p = std::stoi(it->second);
  if (state(p) != s) fail(ErrorCode::Simulation, "state was not produced by this chain");
  return p;
}

std::vector<AgentAction> ChainMdp::actions() { return {{kAdvance, {}}, {kStay, {}}}; }

EnvState ChainMdp::initial_state(Rng&) { return state(0); }

StepResult ChainMdp::step(const EnvState& s, const AgentAction& action, Rng&) {
  const int p = position(s);
  if (action.text == kStay) return StepResult{s, 0.0};
  if (action.text != kAdvance) fail(ErrorCode::Simulation, "unknown chain action '" + action.text + "'");
  if (p + 1 == length_) return StepResult{std::nullopt, 1.0};
  return StepResult{state(p + 1), 0.0};
}

ContextualBandit::ContextualBandit(Table success) : success_(success) {
  for (const auto& row : success_) {
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "success rates must lie in [0, 1]");
    }
  }
}

EnvState ContextualBandit::context(int index) const {
  if (index < 0 || index > 1) fail(ErrorCode::Simulation, "bandit context out of range");
  return EnvState{"bandit context " + std::to_string(index), {{"context", std::to_string(index)}}};
}

std::vector<AgentAction> ContextualBandit::actions() {
  return {{"pull arm 0", {{"arm", "0"}}}, {"pull arm 1", {{"arm", "1"}}}};
}

EnvState ContextualBandit::initial_state(Rng& rng) {
  return context(static_cast<int>(rng.index(2)));
}

StepResult ContextualBandit::step(const EnvState& s, const AgentAction& action, Rng& rng) {
  auto ctx = s.annotations.find("context");
  auto arm = action.annotations.find("arm");
  if (ctx == s.annotations.end() || arm == action.annotations.end()) {
    fail(ErrorCode::Simulation, "bandit step needs a context and an arm");
  }
  const int c = std::stoi(ctx->second);
  const int a = std::stoi(arm->second);
  if (c < 0 || c > 1 || a < 0 || a > 1) fail(ErrorCode::Simulation, "bandit index out of range");
  return StepResult{std::nullopt, rng.bernoulli(success_[c][a]) ? 1.0 : 0.0};
}

ReuseProposer::ReuseProposer(std::vector<AgentAction> actions, double reuse)
    : actions_(std::move(actions)), reuse_(reuse) {
  if (actions_.empty()) fail(ErrorCode::InvalidArgument, "proposer needs at least one action");
  if (!(reuse >= 0.0 && reuse <= 1.0)) fail(ErrorCode::InvalidArgument, "reuse must lie in [0, 1]");
}

std::vector<WeightedAction> ReuseProposer::propose(const EnvState&,
                                                   const memory::Case* retrieved) const {
  const double n = static_cast<double>(actions_.size());
  std::vector<WeightedAction> out;
  out.reserve(actions_.size());
  const bool known = retrieved && std::any_of(actions_.begin(), actions_.end(), [&](const auto& a) {
                       return a.text == retrieved->action_text;
                     });
  for (const auto& a : actions_) {
    double p = 1.0 / n;
    if (known) {
      p = a.text == retrieved->action_text ? reuse_ + (1.0 - reuse_) / n : (1.0 - reuse_) / n;
    }
    out.push_back({a, p});
  }
  return out;
}

ChainExperience seed_chain(ChainMdp& env, CbrMemory& memory, double gamma,
                           std::size_t rollout_horizon) {
  ChainExperience out;
  Rng rng(0);  // the chain is deterministic; the generator is never consulted
  for (const auto& action : ChainMdp::actions()) {
    memory::Case c;
    c.case_id = std::string("chain-") + action.text;
    c.state_text = env.state(0).text;
    c.action_text = action.text;
    out.case_ids.push_back(memory.retain(std::move(c)).case_id);
  }
  const auto actions = ChainMdp::actions();
  for (int p = 0; p < env.length(); ++p) {
    const auto s = env.state(p);
    const auto embedded = memory.embed(s.text);
    for (std::size_t ci = 0; ci < actions.size(); ++ci) {
      auto first = env.step(s, actions[ci], rng);
      double g = first.reward;
      double discount = gamma;
      auto cur = first.next;
      for (std::size_t t = 1; t < rollout_horizon && cur; ++t) {
        auto r = env.step(*cur, actions[0], rng);
        g += discount * r.reward;
        discount *= gamma;
        cur = r.next;
      }
      memory.estimator().add_record(out.case_ids[ci], retrieval::Record{embedded, g});

      retrieval::Transition tr;
      tr.state = embedded;
      tr.case_id = out.case_ids[ci];
      tr.reward = first.reward;
      if (first.next) {
        tr.next_state = memory.embed(first.next->text);
        tr.next_candidates = out.case_ids;
      }
      out.transitions.push_back(std::move(tr));
    }
  }
  return out;
}

std::vector<double> chain_soft_values(const ChainMdp& env, double gamma, double alpha, int sweeps) {
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be > 0");
  const int n = env.length();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    std::vector<double> next(v.size());
    for (int p = 0; p < n; ++p) {
      const double advance = p + 1 == n ? 1.0 : gamma * v[static_cast<std::size_t>(p + 1)];
      const double stay = gamma * v[static_cast<std::size_t>(p)];
      const double top = std::max(advance, stay);
      next[static_cast<std::size_t>(p)] =
          top + alpha * std::log(std::exp((advance - top) / alpha) + std::exp((stay - top) / alpha));
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace mathprep::mmdp
