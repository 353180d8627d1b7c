#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mathprep/memory/case_bank.hpp"

namespace mathprep::memory {

enum class LogKind { Request, Subtask, Tool };

std::string_view to_string(LogKind kind) noexcept;

/// Request entries open a user request; subtask entries (subtask memory)
/// reference a request; tool entries (tool memory) reference a subtask.
struct LogEntry {
  LogKind kind = LogKind::Request;
  std::string id;
  std::string parent_id;
  std::string payload;
  std::string outcome;
  std::int64_t timestamp = 0;

  bool operator==(const LogEntry&) const = default;
};

/// Tool entries with this outcome carry a case line in their payload.
inline constexpr const char* kRetainOutcome = "retain";

/// Append-only interleaved log of subtask and tool interactions.
class SessionLog {
 public:
  /// Throws Error(Reference) when the parent id is unknown.
  void append(LogEntry entry);

  const std::vector<LogEntry>& entries() const noexcept { return entries_; }
  std::vector<LogEntry> entries_of(LogKind kind) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool has_request(const std::string& id) const { return requests_.count(id) > 0; }
  bool has_subtask(const std::string& id) const { return subtasks_.count(id) > 0; }

  /// Monotone logical clock for deterministic timestamps.
  std::int64_t tick() noexcept { return ++clock_; }

 private:
  std::vector<LogEntry> entries_;
  std::set<std::string> requests_;
  std::set<std::string> subtasks_;
  std::int64_t clock_ = 0;
};

/// Functional form of SessionLog::append.
SessionLog append_log(SessionLog log, LogEntry entry);

std::string log_entry_to_line(const LogEntry& entry);
LogEntry log_entry_from_line(std::string_view line);
void save_log(const SessionLog& log, std::ostream& sink);
SessionLog load_log(std::istream& source);

/// Rebuilds a bank from the retain records of a session log.
CaseBank replay_bank(const SessionLog& log);

}  // namespace mathprep::memory
