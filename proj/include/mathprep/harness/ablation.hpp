#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mathprep/agents/backend.hpp"
#include "mathprep/exam/types.hpp"
#include "mathprep/memory/case_bank.hpp"
#include "mathprep/retrieval/q_estimator.hpp"
#include "mathprep/retrieval/retrieval.hpp"

namespace mathprep::harness {

struct AblationVariant {
  std::string name;
  retrieval::RetrievalConfig retrieval;
};

/// The three memory variants: none, readnp and readp.
std::vector<AblationVariant> memory_variants(std::size_t k = 4, double alpha = 1.0,
                                             std::size_t k_pre = 32);

/// Exams to solve, the starting bank and estimator every variant copies, and
/// the items the backend knows without help.
struct AblationWorkload {
  std::vector<exam::Exam> exams;
  memory::CaseBank bank;
  retrieval::QEstimator estimator;
  std::vector<exam::ExamItem> known;
};

struct WorkloadConfig {
  std::size_t k = 4;          // failures stored ahead of a buried success
  double length_scale = 0.05;  // oracle kernel: sharp enough to tell stems apart
  std::size_t dimension = retrieval::kDefaultDimension;
};

/// Oracle-seeded workload. Recognition items are known to the backend.
/// Every other item gets one success case (its key) and k failure cases
/// (a wrong answer), all with the item stem as state. Alternate items store
/// the success first or after the failures, so similarity top-k finds only
/// half of them. D_c holds each case's own outcome at its stem; a success
/// case also holds reward 0 at every other item's stem.
AblationWorkload designed_workload(std::span<const exam::Exam> exams, const WorkloadConfig& config = {});

struct AblationRow {
  std::string variant;
  retrieval::RetrievalConfig retrieval;
  bool failed = false;
  std::string error;
  int items = 0;
  std::optional<double> accuracy;       // percent fully correct
  std::optional<double> hard_accuracy;  // Application-level items
  std::optional<double> step_proxy;
  std::optional<double> latency_mean_s;  // per exam, wall clock
  std::optional<double> latency_p95_s;
  std::uint64_t retrieval_calls = 0;
  std::uint64_t retrieval_work = 0;
};

using BackendFactory = std::function<std::unique_ptr<agents::ChatBackend>(const AblationWorkload&)>;

/// A mock that knows the workload's known items and nothing else.
std::unique_ptr<agents::ChatBackend> mock_factory(const AblationWorkload& workload);

struct AblationConfig {
  std::uint64_t seed = 7;
  int step_threshold = 2;
  BackendFactory backend = mock_factory;
};

/// Solves the same workload once per variant, each with its own copy of the
/// bank, estimator and backend, without retaining new cases. A variant that
/// throws yields a failed row.
std::vector<AblationRow> run_ablation(const AblationWorkload& workload,
                                      std::span<const AblationVariant> variants,
                                      const AblationConfig& config = {});

nlohmann::ordered_json to_json(std::span<const AblationRow> rows);
std::string render_ablation_table(std::span<const AblationRow> rows);

}  // namespace mathprep::harness
