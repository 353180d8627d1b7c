#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "mathprep/error.hpp"
#include "mathprep/mmdp/episode.hpp"
#include "mathprep/mmdp/learning.hpp"
#include "mathprep/mmdp/toy.hpp"
#include "mathprep/retrieval/softmax.hpp"

using namespace mathprep;
using namespace mathprep::mmdp;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

memory::Case make_case(const std::string& id, const std::string& state, const std::string& action) {
  memory::Case c;
  c.case_id = id;
  c.state_text = state;
  c.action_text = action;
  c.reward = 1.0;
  c.success = true;
  return c;
}

class BrokenProposer final : public ActionProposer {
 public:
  std::vector<WeightedAction> propose(const EnvState&, const memory::Case*) const override {
    return {{{"x", {}}, 0.7}, {{"y", {}}, 0.7}};
  }
};

// Steps normally until `fail_at`, then throws.
class FlakyEnv final : public Environment {
 public:
  explicit FlakyEnv(int fail_at) : fail_at_(fail_at) {}
  EnvState initial_state(Rng&) override { return {"s0", {}}; }
  StepResult step(const EnvState&, const AgentAction&, Rng&) override {
    if (++calls_ == fail_at_) throw std::runtime_error("simulator crashed");
    return {EnvState{"s" + std::to_string(calls_), {}}, 0.5};
  }

 private:
  int fail_at_;
  int calls_ = 0;
};

}  // namespace

TEST_CASE("seeded generators repeat their draws") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
  CHECK(code_of([&] { c.index(0); }) == ErrorCode::InvalidArgument);
  Rng parent(5);
  Rng twin(5);
  Rng child = parent.fork();
  CHECK(child.next() != twin.next());
}

TEST_CASE("inverse-CDF sampling follows the distribution") {
  Rng rng(3);
  const std::vector<double> p{0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[sample_index(p, rng)];
  CHECK(counts[1] == 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(static_cast<double>(counts[i]) / n == doctest::Approx(p[i]).epsilon(0.05));
  }
}

TEST_CASE("composite reward is the weight-normalized mean") {
  CHECK(composite_reward(1.0, 0.5, 0.0, {1.0, 1.0, 2.0}) == doctest::Approx(1.5 / 4.0));
  CHECK(composite_reward(0.3, 0.9, 1.0, {}) == doctest::Approx(0.3));
  CHECK(code_of([] { CompositeRewardConfig{0.0, 0.0, 0.0}.check(); }) == ErrorCode::Config);
  CHECK(code_of([] { CompositeRewardConfig{-1.0, 1.0, 1.0}.check(); }) == ErrorCode::Config);
}

TEST_CASE("retrieval modes produce the documented weights") {
  retrieval::HashingEmbedder embedder(64);
  CbrMemory memory(embedder);
  const EnvState s{"integral of x squared", {}};
  CHECK(retrieve(s, memory, {retrieval::RetrievalMode::ReadNP, 2, 1.0, 8}).cases.empty());
  memory.retain(make_case("a", "integral of x squared", "u"));
  memory.retain(make_case("b", "integral of x cubed", "v"));
  memory.retain(make_case("c", "probability of two heads", "w"));
  CHECK(retrieve(s, memory, {retrieval::RetrievalMode::None, 2, 1.0, 8}).cases.empty());

  const auto np = retrieve(s, memory, {retrieval::RetrievalMode::ReadNP, 2, 1.0, 8});
  REQUIRE(np.cases.size() == 2);
  CHECK(np.cases[0].index == 0);
  CHECK(np.mu == std::vector<double>{0.5, 0.5});

  memory.estimator().add_record("a", {memory.embed(s.text), 0.1});
  memory.estimator().add_record("b", {memory.embed(s.text), 0.9});
  memory.estimator().add_record("c", {memory.embed(s.text), 0.5});
  const auto p = retrieve(s, memory, {retrieval::RetrievalMode::ReadP, 2, 0.5, 3});
  REQUIRE(p.cases.size() == 2);
  CHECK(p.cases[0].index == 1);
  CHECK(p.cases[1].index == 2);
  const auto want = oracle::softmax({0.9, 0.5}, 0.5);
  CHECK(p.mu[0] == doctest::Approx(want[0]).epsilon(1e-12));
  CHECK(p.mu[1] == doctest::Approx(want[1]).epsilon(1e-12));
  // A pool of one restricts ReadP to the nearest case.
  const auto narrow = retrieve(s, memory, {retrieval::RetrievalMode::ReadP, 1, 0.5, 1});
  REQUIRE(narrow.cases.size() == 1);
  CHECK(narrow.cases[0].index == 0);
  CHECK(memory.retrieval_calls() == 3);
}

TEST_CASE("mixture rejects an unnormalized proposer") {
  retrieval::HashingEmbedder embedder(16);
  CbrMemory memory(embedder);
  BrokenProposer proposer;
  Rng rng(1);
  CHECK(code_of([&] { cbr_action({"s", {}}, memory, {}, proposer, rng); }) == ErrorCode::Contract);
}

TEST_CASE("greedy selection takes the most probable action") {
  retrieval::HashingEmbedder embedder(16);
  CbrMemory memory(embedder);
  memory.retain(make_case("a", "s", kStay));
  ReuseProposer proposer(ChainMdp::actions(), 0.9);
  Rng rng(1);
  const auto d = cbr_action({"s", {}}, memory, {retrieval::RetrievalMode::ReadNP, 1, 1.0, 4}, proposer, rng,
                            Selection::Greedy);
  CHECK(d.action.text == kStay);
  // Reuse mass plus its share of the uniform remainder.
  CHECK(d.probability == doctest::Approx(0.9 + 0.1 / 2));
}

TEST_CASE("a throwing step aborts the episode and keeps the partial trajectory") {
  retrieval::HashingEmbedder embedder(16);
  CbrMemory memory(embedder);
  FlakyEnv env(3);
  ReuseProposer proposer({{"go", {}}}, 0.9);
  Rng rng(2);
  EpisodeConfig cfg;
  cfg.horizon = 10;
  const auto t = run_episode(env, memory, proposer, cfg, rng);
  CHECK(t.aborted);
  CHECK(t.abort_reason == "simulator crashed");
  CHECK(t.steps.size() == 2);
  CHECK(memory.bank().size() == 2);
}

TEST_CASE("returns match their definitions") {
  Trajectory t;
  for (double r : {1.0, 0.0, 2.0}) {
    TrajectoryStep s;
    s.reward = r;
    s.mu = std::vector<double>{0.5, 0.5};
    t.steps.push_back(s);
  }
  const auto g = returns_to_go(t, 0.5);
  CHECK(g[2] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(g[0] == doctest::Approx(1.5));
  CHECK(discounted_return(t, 0.5) == doctest::Approx(1.5));
  CHECK(code_of([&] { discounted_return(t, 1.0); }) == ErrorCode::InvalidArgument);
  const double h = std::log(2.0);
  CHECK(entropy_regularized_return(t, 0.5, 0.1) == doctest::Approx(3.0 + 3 * 0.1 * h));
  CHECK(entropy_regularized_return(t, 0.5, 0.1, true) ==
        doctest::Approx((1.0 + 0.1 * h) + 0.5 * (0.0 + 0.1 * h) + 0.25 * (2.0 + 0.1 * h)));
  t.steps[1].mu.reset();
  CHECK(code_of([&] { entropy_regularized_return(t, 0.5, 0.1); }) == ErrorCode::Contract);
}

TEST_CASE("trajectories round-trip through JSON Lines") {
  retrieval::HashingEmbedder embedder(32);
  CbrMemory memory(embedder);
  ChainMdp chain(3);
  ReuseProposer proposer(ChainMdp::actions());
  Rng rng(4);
  EpisodeConfig cfg;
  cfg.horizon = 6;
  run_episode(chain, memory, proposer, cfg, rng);
  const auto t = run_episode(chain, memory, proposer, cfg, rng);
  std::stringstream io;
  write_trajectory(t, io);
  const auto back = read_trajectory(io);
  REQUIRE(back.steps.size() == t.steps.size());
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    CHECK(back.steps[i].state == t.steps[i].state);
    CHECK(back.steps[i].action == t.steps[i].action);
    CHECK(back.steps[i].mu == t.steps[i].mu);
    CHECK(back.steps[i].reward == t.steps[i].reward);
    CHECK(back.steps[i].next_state == t.steps[i].next_state);
    CHECK(back.steps[i].retrieved_ids == t.steps[i].retrieved_ids);
    CHECK(back.steps[i].retained_case_id == t.steps[i].retained_case_id);
  }
}

TEST_CASE("Monte-Carlo returns land in the retained cases' datasets") {
  retrieval::HashingEmbedder embedder(32);
  CbrMemory memory(embedder);
  ChainMdp chain(2);
  ReuseProposer proposer({{kAdvance, {}}}, 0.9);
  Rng rng(5);
  EpisodeConfig cfg;
  cfg.gamma = 0.5;
  cfg.retrieval.mode = retrieval::RetrievalMode::None;
  const auto t = run_episode(chain, memory, proposer, cfg, rng);
  REQUIRE(t.steps.size() == 2);
  const auto& first = memory.estimator().dataset(t.steps[0].retained_case_id);
  REQUIRE(first.size() == 1);
  CHECK(first[0].q == doctest::Approx(0.5));
  CHECK(memory.estimator().dataset(t.steps[1].retained_case_id)[0].q == doctest::Approx(1.0));
}

TEST_CASE("soft value iteration agrees with the per-state fixed point") {
  ChainMdp chain(3);
  for (double alpha : {0.01, 0.1, 0.5, 1.0}) {
    const auto lib = chain_soft_values(chain, 0.9, alpha);
    const auto ref = oracle::chain_soft_values(3, 0.9, alpha);
    for (std::size_t i = 0; i < 3; ++i) CHECK(lib[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  }
  // As alpha shrinks the soft value approaches the hard optimum gamma^2.
  CHECK(chain_soft_values(chain, 0.9, 1e-4)[0] == doctest::Approx(0.81).epsilon(1e-3));
  CHECK(code_of([&] { chain_soft_values(chain, 0.9, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("chain dynamics") {
  ChainMdp chain(3);
  Rng rng(0);
  const auto s0 = chain.initial_state(rng);
  CHECK(chain.position(s0) == 0);
  const auto stay = chain.step(s0, {kStay, {}}, rng);
  CHECK(stay.next == s0);
  CHECK(stay.reward == 0.0);
  const auto end = chain.step(chain.state(2), {kAdvance, {}}, rng);
  CHECK_FALSE(end.next.has_value());
  CHECK(end.reward == 1.0);
  CHECK(code_of([&] { chain.step(s0, {"jump", {}}, rng); }) == ErrorCode::Simulation);
  CHECK(code_of([&] { chain.position({"elsewhere", {}}); }) == ErrorCode::Simulation);
}

TEST_CASE("minibatch TD training is deterministic under a seed") {
  auto run = [] {
    retrieval::HashingEmbedder embedder;
    retrieval::EstimatorConfig ec;
    ec.alpha = 0.1;
    ec.step_size = 0.5;
    CbrMemory memory(embedder, ec);
    ChainMdp chain(3);
    const auto experience = seed_chain(chain, memory, ec.gamma);
    TdTrainingConfig tc;
    tc.updates = 300;
    tc.batch_size = 2;
    tc.seed = 11;
    const auto r = train_td(memory.estimator(), experience.transitions, tc);
    return std::make_pair(r.losses, memory.estimator().params());
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first.size() == 300);
}

TEST_CASE("transitions follow the recorded trajectory") {
  retrieval::HashingEmbedder embedder(32);
  CbrMemory memory(embedder);
  ChainMdp chain(3);
  ReuseProposer proposer({{kAdvance, {}}}, 0.9);
  Rng rng(6);
  EpisodeConfig cfg;
  cfg.retrieval.mode = retrieval::RetrievalMode::None;
  const auto t = run_episode(chain, memory, proposer, cfg, rng);
  const auto samples = transitions_from(t, memory);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].case_id == t.steps[0].retained_case_id);
  CHECK(samples[0].next_candidates == std::vector<std::string>{t.steps[1].retained_case_id});
  CHECK_FALSE(samples[2].next_state.has_value());
  CHECK(samples[2].reward == 1.0);
}
