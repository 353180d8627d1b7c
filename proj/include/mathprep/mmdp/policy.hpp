#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mathprep/memory/case_bank.hpp"
#include "mathprep/mmdp/environment.hpp"
#include "mathprep/mmdp/rng.hpp"
#include "mathprep/retrieval/retrieval.hpp"

namespace mathprep::mmdp {

/// Case bank, kernel estimator and the embedding cache of one session.
/// Counts retrieval operations so wiring can be asserted.
class CbrMemory {
 public:
  explicit CbrMemory(const retrieval::Embedder& embedder, retrieval::EstimatorConfig config = {});
  CbrMemory(memory::CaseBank bank, retrieval::QEstimator estimator,
            const retrieval::Embedder& embedder);

  const memory::CaseBank& bank() const noexcept { return bank_; }
  retrieval::QEstimator& estimator() noexcept { return estimator_; }
  const retrieval::QEstimator& estimator() const noexcept { return estimator_; }
  const retrieval::Embedder& embedder() const noexcept { return cache_.embedder(); }

  const memory::Case& retain(memory::Case c);
  retrieval::Embedding embed(std::string_view text) const { return embedder().embed(text); }
  std::span<const retrieval::Embedding> case_embeddings();

  std::uint64_t retrieval_calls() const noexcept { return retrieval_calls_; }
  /// Similarity plus kernel evaluations spent by retrieval; a deterministic
  /// cost proxy that sits beside wall-clock latency.
  std::uint64_t retrieval_work() const noexcept { return retrieval_work_; }
  void count_retrieval(std::uint64_t work = 0) noexcept {
    ++retrieval_calls_;
    retrieval_work_ += work;
  }

 private:
  memory::CaseBank bank_;
  retrieval::QEstimator estimator_;
  retrieval::CaseEmbeddings cache_;
  std::uint64_t retrieval_calls_ = 0;
  std::uint64_t retrieval_work_ = 0;
};

struct WeightedAction {
  AgentAction action;
  double probability = 0.0;
};

/// p_LLM(a | s, c): a distribution over candidate actions conditioned on the
/// state and at most one retrieved case (null when unconditioned).
class ActionProposer {
 public:
  virtual ~ActionProposer() = default;
  virtual std::vector<WeightedAction> propose(const EnvState& state,
                                              const memory::Case* retrieved) const = 0;
};

enum class Selection { Sample, Greedy };

/// Retrieved cases with their mixture weights mu(c | s, m).
struct Retrieval {
  std::vector<retrieval::RetrievedCase> cases;
  std::vector<double> mu;
};

/// Mixture weights for the given state. None mode and an empty bank return
/// no cases. ReadNP weights the K nearest uniformly; ReadP scores the K_pre
/// nearest by Q_EC, keeps the top K and applies softmax(Q / alpha).
Retrieval retrieve(const EnvState& state, CbrMemory& memory,
                   const retrieval::RetrievalConfig& config);

struct CbrDecision {
  AgentAction action;
  double probability = 0.0;  // pi(action | s, m)
  Retrieval retrieval;
  std::vector<WeightedAction> mixture;  // full pi(. | s, m) in first-seen order
};

/// pi(a | s, m) = sum_c mu(c | s, m) p(a | s, c), merged by action text.
/// Throws Error(Contract) when a proposer distribution is not normalized.
std::vector<WeightedAction> mixture(const EnvState& state, const memory::CaseBank& bank,
                                    const Retrieval& retrieved, const ActionProposer& proposer);

/// Retrieve, mix and select. Greedy picks the most probable action, ties to
/// the first seen.
CbrDecision cbr_action(const EnvState& state, CbrMemory& memory,
                       const retrieval::RetrievalConfig& config, const ActionProposer& proposer,
                       Rng& rng, Selection selection = Selection::Sample);

}  // namespace mathprep::mmdp
