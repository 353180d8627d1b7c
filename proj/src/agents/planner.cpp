#include "mathprep/agents/planner.hpp"

#include "mathprep/error.hpp"

namespace mathprep::agents {

std::string_view to_string(RequestKind kind) noexcept {
  switch (kind) {
    case RequestKind::GenerateExam: return "generate_exam";
    case RequestKind::SolveExam: return "solve_exam";
    case RequestKind::TutorStudent: return "tutor_student";
  }
  return "?";
}

RequestKind parse_request_kind(std::string_view text) {
  if (text == "generate_exam") return RequestKind::GenerateExam;
  if (text == "solve_exam") return RequestKind::SolveExam;
  if (text == "tutor_student") return RequestKind::TutorStudent;
  fail(ErrorCode::Dispatch, "unknown request kind '" + std::string(text) + "'");
}

std::string_view to_string(SubtaskStatus status) noexcept {
  switch (status) {
    case SubtaskStatus::Pending: return "pending";
    case SubtaskStatus::Running: return "running";
    case SubtaskStatus::Done: return "done";
    case SubtaskStatus::Failed: return "failed";
  }
  return "?";
}

void Subtask::advance(SubtaskStatus next) {
  const bool ok = (status == SubtaskStatus::Pending && next == SubtaskStatus::Running) ||
                  (status == SubtaskStatus::Running &&
                   (next == SubtaskStatus::Done || next == SubtaskStatus::Failed));
  if (!ok) {
    fail(ErrorCode::Contract, "subtask " + id + " cannot move from " +
                                  std::string(to_string(status)) + " to " +
                                  std::string(to_string(next)));
  }
  status = next;
}

namespace {

Subtask make(const PlannerRequest& r, int order, const char* role, const char* kind) {
  Subtask s;
  s.order = order;
  s.id = r.id + "/" + std::to_string(order) + "-" + kind;
  s.role = role;
  s.kind = kind;
  s.input = r.payload;
  return s;
}

}  // namespace

std::vector<Subtask> plan(const PlannerRequest& request) {
  switch (request.kind) {
    case RequestKind::GenerateExam:
      return {make(request, 1, "generator", "generate"), make(request, 2, "generator", "validate")};
    case RequestKind::SolveExam:
      return {make(request, 1, "solver", "normalize"), make(request, 2, "solver", "solve"),
              make(request, 3, "solver", "grade")};
    case RequestKind::TutorStudent:
      return {make(request, 1, "tutor", "analyze"), make(request, 2, "tutor", "recommend"),
              make(request, 3, "tutor", "simulate")};
  }
  fail(ErrorCode::Dispatch, "unknown request kind " + std::to_string(static_cast<int>(request.kind)));
}

Orchestrator::Orchestrator(memory::SessionLog& log, int retry_limit)
    : log_(&log), retry_limit_(retry_limit) {
  if (retry_limit < 0) fail(ErrorCode::Config, "retry limit must be >= 0");
}

Orchestrator::Result Orchestrator::run(const PlannerRequest& request) {
  Result result;
  result.subtasks = plan(request);
  log_->append({memory::LogKind::Request, request.id, "", request.payload,
                std::string(to_string(request.kind)), log_->tick()});
  for (std::size_t i = 0; i < result.subtasks.size(); ++i) {
    // Take a copy: appending retries may reallocate the vector.
    Subtask task = result.subtasks[i];
    auto it = handlers_.find(task.kind);
    if (it == handlers_.end()) fail(ErrorCode::Dispatch, "no handler for subtask '" + task.kind + "'");
    task.advance(SubtaskStatus::Running);
    log_->append({memory::LogKind::Subtask, task.id, request.id, task.kind,
                  std::string(to_string(task.status)), log_->tick()});
    const bool ok = it->second(task);
    task.advance(ok ? SubtaskStatus::Done : SubtaskStatus::Failed);
    log_->append({memory::LogKind::Subtask, task.id, request.id, task.kind,
                  std::string(to_string(task.status)), log_->tick()});
    result.subtasks[i] = task;
    if (ok) continue;
    if (task.kind == "validate" && result.regenerations < retry_limit_) {
      ++result.regenerations;
      const int next = static_cast<int>(result.subtasks.size()) + 1;
      result.subtasks.push_back(make(request, next, "generator", "regenerate"));
      result.subtasks.push_back(make(request, next + 1, "generator", "validate"));
      continue;
    }
    return result;
  }
  result.succeeded = true;
  return result;
}

}  // namespace mathprep::agents
