#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mathprep/agents/backend.hpp"
#include "mathprep/error.hpp"
#include "mathprep/exam/types.hpp"
#include "mathprep/harness/run_config.hpp"
#include "mathprep/mmdp/policy.hpp"

namespace mathprep::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitBackend = 4;
inline constexpr int kExitCheck = 5;  // compliance or assertion failure

int exit_code_for(ErrorCode code) noexcept;

/// A finished command: the sealed report, its text rendering, files to write
/// under the output directory and the exit status.
struct CommandResult {
  nlohmann::ordered_json report;
  std::string table;
  std::vector<std::pair<std::string, std::string>> artifacts;
  int status = kExitOk;
};

/// Writes report.json, report.txt and every artifact under `out_dir`.
void write_outputs(const CommandResult& result, const std::string& out_dir);

/// "mock" or "http" (configured from the environment).
std::unique_ptr<agents::ChatBackend> make_backend(const RunConfig& config);

/// Bank and estimator from `config.bank` (bank.jsonl, estimator.json), or a
/// fresh memory when unset.
mmdp::CbrMemory open_memory(const RunConfig& config, const retrieval::Embedder& embedder);

/// Interchange JSON, or plain text through the input normalizer.
exam::Exam load_exam_any(const std::string& path);
std::vector<exam::Exam> load_exams(std::span<const std::string> paths);

CommandResult run_gen(const RunConfig& config, agents::ChatBackend& backend);
/// Status kExitCheck when any exam violates the blueprint.
CommandResult run_validate(const RunConfig& config);
/// Grades config.exams[0] against a responses file written by solve.
CommandResult run_grade(const RunConfig& config, const std::string& responses_path);
CommandResult run_solve(const RunConfig& config, agents::ChatBackend& backend);
/// The config's exams merged into one assessment; generated when none given.
CommandResult run_tutor_sim(const RunConfig& config);
/// TD training on the three-state chain; status kExitCheck when the start
/// value misses the soft value-iteration reference by more than 0.05.
CommandResult run_train_q(const RunConfig& config);
/// generate (or load), validate, solve, grade, then metrics.
CommandResult run_eval(const RunConfig& config, agents::ChatBackend& backend);
/// The three memory variants on the designed workload; status kExitCheck
/// when an accuracy direction check fails.
CommandResult run_ablate(const RunConfig& config);

}  // namespace mathprep::harness
