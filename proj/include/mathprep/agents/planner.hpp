#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mathprep/memory/session_log.hpp"

namespace mathprep::agents {

enum class RequestKind { GenerateExam, SolveExam, TutorStudent };
std::string_view to_string(RequestKind kind) noexcept;
/// Throws Error(Dispatch) for an unknown kind.
RequestKind parse_request_kind(std::string_view text);

struct PlannerRequest {
  RequestKind kind = RequestKind::GenerateExam;
  std::string id;
  std::string payload;
};

enum class SubtaskStatus { Pending, Running, Done, Failed };
std::string_view to_string(SubtaskStatus status) noexcept;

struct Subtask {
  int order = 0;
  std::string id;
  std::string role;  // executor agent
  std::string kind;  // generate, validate, regenerate, normalize, solve, grade, ...
  std::string input;
  SubtaskStatus status = SubtaskStatus::Pending;

  /// Moves pending -> running -> done|failed. Throws Error(Contract) otherwise.
  void advance(SubtaskStatus next);
};

/// Dispatch table:
///   GenerateExam -> generate, validate
///   SolveExam    -> normalize, solve, grade
///   TutorStudent -> analyze, recommend, simulate
/// Throws Error(Dispatch) on an out-of-range kind.
std::vector<Subtask> plan(const PlannerRequest& request);

inline constexpr int kDefaultRetryLimit = 3;

/// Executes a plan with one handler per subtask kind. A failed validate
/// appends a regenerate and a fresh validate, at most `retry_limit` times.
/// Every request, subtask and outcome is appended to the session log.
class Orchestrator {
 public:
  using Handler = std::function<bool(const Subtask&)>;

  explicit Orchestrator(memory::SessionLog& log, int retry_limit = kDefaultRetryLimit);
  void on(const std::string& kind, Handler handler) { handlers_[kind] = std::move(handler); }

  struct Result {
    std::vector<Subtask> subtasks;
    bool succeeded = false;
    int regenerations = 0;
  };

  /// Throws Error(Dispatch) when a subtask kind has no handler.
  Result run(const PlannerRequest& request);

 private:
  memory::SessionLog* log_;
  int retry_limit_;
  std::map<std::string, Handler> handlers_;
};

}  // namespace mathprep::agents
