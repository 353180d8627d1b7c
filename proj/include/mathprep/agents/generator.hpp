#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mathprep/agents/backend.hpp"
#include "mathprep/agents/planner.hpp"
#include "mathprep/exam/blueprint.hpp"
#include "mathprep/memory/session_log.hpp"
#include "mathprep/mmdp/policy.hpp"

namespace mathprep::agents {

struct GenerationConfig {
  retrieval::RetrievalConfig retrieval;
  std::uint64_t seed = 0;
  std::string exam_id = "generated";
  int retry_limit = kDefaultRetryLimit;  // per item, for unparseable output
  int attempt = 0;                       // whole-exam regeneration counter
  double novelty_threshold = 30.0;  // percent
  int novelty_n = 3;
  DecodeParams decode;
};

struct GeneratedItemReport {
  std::string item_id;
  double novelty = 0.0;  // percent n-gram overlap against the reference set
  int attempts = 0;
  std::string exemplar_case_id;
};

struct GenerationResult {
  exam::Exam exam;
  std::vector<GeneratedItemReport> items;
  exam::ComplianceReport compliance;
  std::vector<std::string> retained_case_ids;
};

/// State text of the generation case for a blueprint cell.
std::string generation_state(const exam::CellKey& cell, int topic_code);

/// One item per required slot. Each prompt carries the cell, the item id and
/// an exemplar case drawn from the retrieval mixture. Novelty is measured
/// against `reference` stems plus every item stem already in the bank.
/// Every item is retained as a case with reward 1 when the exam is compliant
/// and the item's novelty is within the threshold, else 0.
/// Throws Error(Generation), carrying raw outputs as details, when an item
/// stays unparseable after the retry budget.
GenerationResult generate_exam(const exam::SpecificationMatrix& matrix, mmdp::CbrMemory& memory,
                               ChatBackend& backend, const GenerationConfig& config,
                               std::span<const exam::ExamItem> reference = {},
                               memory::SessionLog* log = nullptr,
                               const std::string& parent_subtask = {});

struct OrchestratedGeneration {
  GenerationResult result;
  Orchestrator::Result run;
};

/// Planner-driven generate/validate loop with regeneration on a failed
/// validate. `inject_validate_failures` forces that many validations to fail.
/// Throws Error(Generation) when no compliant exam is produced.
OrchestratedGeneration generate_validated_exam(const exam::SpecificationMatrix& matrix,
                                               mmdp::CbrMemory& memory, ChatBackend& backend,
                                               const GenerationConfig& config,
                                               memory::SessionLog& log,
                                               std::span<const exam::ExamItem> reference = {},
                                               int inject_validate_failures = 0);

}  // namespace mathprep::agents
