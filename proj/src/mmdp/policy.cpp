#include "mathprep/mmdp/policy.hpp"

#include <algorithm>
#include <cmath>

#include "mathprep/error.hpp"
#include "mathprep/retrieval/softmax.hpp"

namespace mathprep::mmdp {

CbrMemory::CbrMemory(const retrieval::Embedder& embedder, retrieval::EstimatorConfig config)
    : estimator_(embedder.dimension(), config), cache_(embedder) {}

CbrMemory::CbrMemory(memory::CaseBank bank, retrieval::QEstimator estimator,
                     const retrieval::Embedder& embedder)
    : bank_(std::move(bank)), estimator_(std::move(estimator)), cache_(embedder) {
  if (estimator_.dimension() != embedder.dimension()) {
    fail(ErrorCode::Shape, "estimator and embedder dimensions differ");
  }
  estimator_.check_references(bank_);
}

const memory::Case& CbrMemory::retain(memory::Case c) { return bank_.retain(std::move(c)); }

std::span<const retrieval::Embedding> CbrMemory::case_embeddings() {
  cache_.sync(bank_);
  return cache_.embeddings();
}

Retrieval retrieve(const EnvState& state, CbrMemory& memory,
                   const retrieval::RetrievalConfig& config) {
  config.check();
  Retrieval out;
  if (config.mode == retrieval::RetrievalMode::None || memory.bank().empty()) return out;
  const auto query = memory.embed(state.text);
  const auto embeddings = memory.case_embeddings();
  std::uint64_t work = embeddings.size();
  if (config.mode == retrieval::RetrievalMode::ReadNP) {
    memory.count_retrieval(work);
    out.cases = retrieval::read_np(query, embeddings, config.k);
    out.mu.assign(out.cases.size(), 1.0 / static_cast<double>(out.cases.size()));
    return out;
  }
  const auto nearest = retrieval::read_np(query, embeddings, config.k_pre);
  std::vector<std::size_t> pool;
  pool.reserve(nearest.size());
  for (const auto& r : nearest) {
    pool.push_back(r.index);
    work += memory.estimator().dataset(memory.bank().at(r.index).case_id).size();
  }
  memory.count_retrieval(work);
  out.cases = retrieval::read_p(query, memory.bank(), memory.estimator(), config.k, pool);
  std::vector<double> q;
  q.reserve(out.cases.size());
  for (const auto& r : out.cases) q.push_back(r.score);
  out.mu = retrieval::softmax(q, config.alpha);
  return out;
}

namespace {

void check_proposal(const std::vector<WeightedAction>& proposal) {
  if (proposal.empty()) fail(ErrorCode::Contract, "proposer returned no actions");
  double sum = 0.0;
  for (const auto& wa : proposal) {
    if (!(wa.probability >= 0.0) || !std::isfinite(wa.probability)) {
      fail(ErrorCode::Contract, "proposer returned an invalid probability");
    }
    if (wa.action.text.empty()) fail(ErrorCode::Contract, "proposer returned an empty action");
    sum += wa.probability;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::Contract, "proposer distribution sums to " + std::to_string(sum));
  }
}

void accumulate(std::vector<WeightedAction>& out, const std::vector<WeightedAction>& proposal,
                double weight) {
  for (const auto& wa : proposal) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const WeightedAction& x) { return x.action.text == wa.action.text; });
    if (it == out.end()) {
      out.push_back({wa.action, weight * wa.probability});
    } else {
      it->probability += weight * wa.probability;
    }
  }
}

}  // namespace

std::vector<WeightedAction> mixture(const EnvState& state, const memory::CaseBank& bank,
                                    const Retrieval& retrieved, const ActionProposer& proposer) {
  if (retrieved.cases.size() != retrieved.mu.size()) {
    fail(ErrorCode::Shape, "retrieval weights do not match retrieved cases");
  }
  std::vector<WeightedAction> out;
  if (retrieved.cases.empty()) {
    auto proposal = proposer.propose(state, nullptr);
    check_proposal(proposal);
    accumulate(out, proposal, 1.0);
    return out;
  }
  for (std::size_t i = 0; i < retrieved.cases.size(); ++i) {
    auto proposal = proposer.propose(state, &bank.at(retrieved.cases[i].index));
    check_proposal(proposal);
    accumulate(out, proposal, retrieved.mu[i]);
  }
  return out;
}

CbrDecision cbr_action(const EnvState& state, CbrMemory& memory,
                       const retrieval::RetrievalConfig& config, const ActionProposer& proposer,
                       Rng& rng, Selection selection) {
  CbrDecision out;
  out.retrieval = retrieve(state, memory, config);
  out.mixture = mixture(state, memory.bank(), out.retrieval, proposer);
  std::size_t chosen = 0;
  if (selection == Selection::Greedy) {
    for (std::size_t i = 1; i < out.mixture.size(); ++i) {
      if (out.mixture[i].probability > out.mixture[chosen].probability) chosen = i;
    }
  } else {
    std::vector<double> p;
    p.reserve(out.mixture.size());
    for (const auto& wa : out.mixture) p.push_back(wa.probability);
    chosen = sample_index(p, rng);
  }
  out.action = out.mixture[chosen].action;
  out.probability = out.mixture[chosen].probability;
  return out;
}

}  // namespace mathprep::mmdp
