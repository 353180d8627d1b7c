#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mathprep/agents/backend.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/memory/session_log.hpp"
#include "mathprep/mmdp/policy.hpp"

namespace mathprep::agents {

struct SolveConfig {
  retrieval::RetrievalConfig retrieval;
  std::uint64_t seed = 0;
  DecodeParams decode;
  bool retain = true;  // retain each graded item as a case
  std::string case_prefix = "solve";
};

struct SolvedItem {
  exam::Response response;
  std::string steps;  // worked steps, one per line
  bool flagged = false;  // backend output had no parseable answer
  std::vector<std::string> retrieved_ids;
  std::string raw;
};

struct SolveResult {
  std::vector<SolvedItem> items;
  std::vector<std::string> retained_case_ids;
};

/// Parses an ANSWER payload for the item's format. "UNKNOWN" is a valid
/// abstention and yields Unanswered; anything else unparseable yields
/// nullopt.
std::optional<exam::Response> parse_response(const exam::ExamItem& item, std::string_view answer);

/// Per item: retrieve solved cases by the stem, list them in the prompt with
/// their weights and rewards, and parse the structured answer. When
/// `config.retain` is set every item is graded against its key and retained
/// as a case (state = stem, action = answer) with reward 1 if fully correct
/// else 0; that reward is recorded in D_c of the new case and of every case
/// that was retrieved for it.
SolveResult solve_exam(const exam::Exam& exam, mmdp::CbrMemory& memory, ChatBackend& backend,
                       const SolveConfig& config, memory::SessionLog* log = nullptr,
                       const std::string& parent_subtask = {});

/// Convenience: the responses of a solve result.
std::vector<exam::Response> responses_of(const SolveResult& result);

}  // namespace mathprep::agents
