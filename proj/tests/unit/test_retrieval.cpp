#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"

#include "mathprep/error.hpp"
#include "mathprep/retrieval/embedding.hpp"
#include "mathprep/retrieval/kernel.hpp"
#include "mathprep/retrieval/q_estimator.hpp"
#include "mathprep/retrieval/retrieval.hpp"
#include "mathprep/retrieval/softmax.hpp"
#include "mathprep/retrieval/training.hpp"

using namespace mathprep;
using namespace mathprep::retrieval;

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

memory::Case named(const std::string& id, const std::string& state) {
  memory::Case c;
  c.case_id = id;
  c.state_text = state;
  c.action_text = "act";
  return c;
}

}  // namespace

TEST_CASE("embeddings reject non-finite entries") {
  CHECK(code_of([] { Embedding({1.0, std::numeric_limits<double>::infinity()}); }) == ErrorCode::Domain);
  const Embedding a({3.0, 4.0});
  CHECK(a.norm() == doctest::Approx(5.0));
  CHECK(cosine(a, Embedding::zeros(2)) == 0.0);
  CHECK(code_of([&] { dot(a, Embedding::zeros(3)); }) == ErrorCode::Shape);
}

TEST_CASE("hashing embedder is deterministic and unit length") {
  HashingEmbedder e(64);
  const auto a = e.embed("Cho hàm số y = (ax + b)/(cx + d)");
  CHECK(a == e.embed("Cho hàm số y = (ax + b)/(cx + d)"));
  CHECK(a.size() == 64);
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(e.embed("").norm() == 0.0);
  CHECK(e.embed("ab").norm() == doctest::Approx(1.0));
  CHECK(cosine(a, e.embed("Cho hàm số y = (ax + b)/(cx + d)")) == doctest::Approx(1.0));
}

TEST_CASE("kernel matches its closed form") {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 50; ++i) {
    const auto a = oracle::random_vector(gen, 5);
    const auto b = oracle::random_vector(gen, 5);
    KernelParams p;
    p.diag_scale = oracle::random_vector(gen, 5, 0.1, 2.0);
    p.length_scale = oracle::random_vector(gen, 1, 0.2, 3.0)[0];
    const double want = static_cast<double>(oracle::kernel(a, b, p.diag_scale, p.length_scale));
    CHECK(kernel_value(p, Embedding(a), Embedding(b)) == doctest::Approx(want).epsilon(1e-12));
  }
  auto bad = KernelParams::isotropic(3);
  bad.diag_scale[1] = 0.0;
  CHECK(code_of([&] { bad.check(); }) == ErrorCode::Config);
  CHECK(code_of([] { weighted_sq_distance(KernelParams::isotropic(2), Embedding({1, 2, 3}), Embedding({1, 2, 3})); }) ==
        ErrorCode::Shape);
}

TEST_CASE("softmax and entropy reject invalid input") {
  CHECK(code_of([] { softmax(std::vector<double>{}, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { softmax(std::vector<double>{1.0}, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { entropy(std::vector<double>{0.5, 0.6}); }) == ErrorCode::Domain);
  CHECK(code_of([] { entropy(std::vector<double>{1.5, -0.5}); }) == ErrorCode::Domain);
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  // Extreme values stay finite after max subtraction.
  const auto p = softmax(std::vector<double>{1000.0, 0.0}, 0.01);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("q_ec falls back to the prior on an empty dataset") {
  EstimatorConfig cfg;
  cfg.q0 = 0.25;
  QEstimator est(4, cfg);
  const auto v = q_ec(Embedding({0, 0, 0, 1}), "unknown", est);
  CHECK(v.cold_start);
  CHECK(v.value == 0.25);
  est.add_record("c", {Embedding({0, 0, 0, 1}), 0.8});
  const auto single = q_ec(Embedding({1, 0, 0, 0}), "c", est);
  CHECK_FALSE(single.cold_start);
  CHECK(single.value == 0.8);
  CHECK(code_of([&] { est.add_record("c", {Embedding({0, 1}), 0.0}); }) == ErrorCode::Shape);
  CHECK(code_of([&] { est.add_record("c", {Embedding({0, 0, 0, 1}), NAN}); }) == ErrorCode::Domain);
}

TEST_CASE("dataset references must name bank cases") {
  QEstimator est(2);
  est.add_record("ghost", {Embedding({1, 0}), 1.0});
  memory::CaseBank bank;
  bank.retain(named("real", "x"));
  CHECK(code_of([&] { est.check_references(bank); }) == ErrorCode::Reference);
}

TEST_CASE("read_np breaks ties toward the earlier case") {
  const std::vector<Embedding> states{Embedding({1, 0}), Embedding({0, 1}), Embedding({1, 0}), Embedding({1, 1})};
  const auto top = read_np(Embedding({1, 0}), states, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].index == 0);
  CHECK(top[1].index == 2);
  CHECK(top[2].index == 3);
  CHECK(read_np(Embedding({1, 0}), states, 10).size() == 4);
  CHECK(code_of([&] { read_np(Embedding({1, 0}), states, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("read_p ranks by Q and respects the pool") {
  memory::CaseBank bank;
  for (const char* id : {"a", "b", "c"}) bank.retain(named(id, id));
  EstimatorConfig cfg;
  cfg.q0 = 0.5;
  QEstimator est(2, cfg);
  est.add_record("a", {Embedding({1, 0}), 0.1});
  est.add_record("c", {Embedding({1, 0}), 0.9});
  const auto all = read_p(Embedding({1, 0}), bank, est, 3);
  REQUIRE(all.size() == 3);
  CHECK(all[0].index == 2);
  CHECK(all[1].index == 1);
  CHECK(all[1].cold_start);
  CHECK(all[2].index == 0);
  const std::vector<std::size_t> pool{0, 1};
  const auto some = read_p(Embedding({1, 0}), bank, est, 1, pool);
  REQUIRE(some.size() == 1);
  CHECK(some[0].index == 1);
  CHECK(parse_retrieval_mode("readp") == RetrievalMode::ReadP);
  CHECK(code_of([] { parse_retrieval_mode("top"); }) == ErrorCode::Config);
  CHECK(code_of([] { RetrievalConfig{RetrievalMode::ReadP, 8, 1.0, 4}.check(); }) == ErrorCode::Config);
}

TEST_CASE("retrieval distribution is the softmax of Q over alpha") {
  EstimatorConfig cfg;
  cfg.alpha = 0.5;
  QEstimator est(2, cfg);
  est.add_record("a", {Embedding({1, 0}), 0.2});
  est.add_record("b", {Embedding({1, 0}), 0.7});
  const std::vector<std::string> ids{"a", "b"};
  const auto p = retrieval_distribution(Embedding({0, 1}), ids, est);
  const auto want = oracle::softmax({0.2, 0.7}, 0.5);
  CHECK(p[0] == doctest::Approx(want[0]).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(want[1]).epsilon(1e-12));
}

TEST_CASE("checkpoints restore every field") {
  EstimatorConfig cfg;
  cfg.alpha = 0.3;
  cfg.backup = SoftBackup::Literal;
  KernelParams params = KernelParams::isotropic(3, 1.5, 0.7);
  QEstimator est(params, cfg);
  est.add_record("a", {Embedding({0.1, 0.2, 0.3}), 0.123456789012345});
  est.add_record("b", {Embedding({-1, 0, 1}), -2.5});
  params.length_scale = 0.9;
  est.set_params(params);
  est.restore_counters(17, 3);
  std::stringstream io;
  save_checkpoint(est, io);
  const auto back = load_checkpoint(io);
  CHECK(back.params() == est.params());
  CHECK(back.target() == est.target());
  CHECK(back.config() == est.config());
  CHECK(back.datasets() == est.datasets());
  CHECK(back.update_count() == 17);
  CHECK(back.sync_count() == 3);

  std::stringstream again;
  save_checkpoint(est, again);
  auto json = nlohmann::ordered_json::parse(again.str());
  json["version"] = kCheckpointVersion + 1;
  std::stringstream future(json.dump());
  CHECK(code_of([&] { load_checkpoint(future); }) == ErrorCode::Version);
  std::stringstream junk("[1, 2]");
  CHECK(code_of([&] { load_checkpoint(junk); }) == ErrorCode::Format);
}

TEST_CASE("TD target backs up the soft value of the successor") {
  EstimatorConfig cfg;
  cfg.gamma = 0.5;
  cfg.alpha = 1.0;
  QEstimator est(KernelParams::isotropic(2), cfg);
  est.add_record("a", {Embedding({1, 0}), 1.0});
  est.add_record("b", {Embedding({0, 1}), 2.0});
  Transition t{Embedding({1, 0}), "a", 0.5, Embedding({0, 1}), {"a", "b"}};
  const double v = std::log(std::exp(1.0) + std::exp(2.0));
  CHECK(td_target(t, est) == doctest::Approx(0.5 + 0.5 * v));
  t.next_state.reset();
  CHECK(td_target(t, est) == 0.5);
}

TEST_CASE("gradient steps respect step size, floor and target syncs") {
  EstimatorConfig cfg;
  cfg.step_size = 0.0;
  cfg.sync_every = 2;
  QEstimator est(KernelParams::isotropic(2), cfg);
  est.add_record("a", {Embedding({1, 0}), 0.0});
  est.add_record("a", {Embedding({0, 1}), 1.0});
  const std::vector<Transition> batch{{Embedding({0.9, 0.1}), "a", 1.0, std::nullopt, {}}};
  const auto before = est.params();
  td_update(est, batch);
  CHECK(est.params() == before);

  est.mutable_config().step_size = -1.0;
  CHECK(code_of([&] { td_update(est, batch); }) == ErrorCode::Config);
  est.mutable_config().step_size = 0.1;
  CHECK(code_of([&] { td_update(est, std::span<const Transition>{}); }) == ErrorCode::InvalidArgument);

  const std::vector<double> huge{1e9, 1e9};
  est.apply_step(huge, 1e9, 1.0);
  CHECK(est.params().diag_scale[0] == doctest::Approx(est.config().param_floor));
  CHECK(est.params().length_scale == doctest::Approx(est.config().param_floor));
  const auto synced = est.sync_count();
  const std::vector<double> zero{0.0, 0.0};
  est.apply_step(zero, 0.0, 1.0);
  est.apply_step(zero, 0.0, 1.0);
  CHECK(est.sync_count() == synced + 1);
  CHECK(est.target() == est.params());
}

TEST_CASE("cross-entropy rejects non-binary rewards") {
  QEstimator est(2);
  est.add_record("a", {Embedding({1, 0}), 0.5});
  const std::vector<BinaryExample> batch{{Embedding({1, 0}), "a", 0.5}};
  CHECK(code_of([&] { ce_loss(est, batch, est.params()); }) == ErrorCode::Domain);
  // Q = 1 would give an infinite loss; the clamp keeps it finite.
  QEstimator sure(2);
  sure.add_record("a", {Embedding({1, 0}), 1.0});
  const std::vector<BinaryExample> miss{{Embedding({1, 0}), "a", 0.0}};
  CHECK(ce_loss(sure, miss, sure.params()) == doctest::Approx(-std::log(kProbabilityClamp)));
}

TEST_CASE("TD updates reduce the loss on a fixed batch") {
  EstimatorConfig cfg;
  cfg.step_size = 0.2;
  cfg.sync_every = 0;
  QEstimator est(KernelParams::isotropic(2, 1.0, 1.0), cfg);
  est.add_record("a", {Embedding({1, 0}), 0.0});
  est.add_record("a", {Embedding({0, 1}), 1.0});
  const std::vector<Transition> batch{{Embedding({0.2, 0.8}), "a", 1.0, std::nullopt, {}},
                                      {Embedding({0.8, 0.2}), "a", 0.0, std::nullopt, {}}};
  const double start = td_loss(est, batch, est.params());
  for (int i = 0; i < 50; ++i) td_update(est, batch);
  CHECK(td_loss(est, batch, est.params()) < start);
}
