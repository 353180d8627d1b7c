#include "mathprep/memory/session_log.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "mathprep/error.hpp"
#include "mathprep/memory/case_store.hpp"

namespace mathprep::memory {

std::string_view to_string(LogKind kind) noexcept {
  switch (kind) {
    case LogKind::Request: return "request";
    case LogKind::Subtask: return "subtask";
    case LogKind::Tool: return "tool";
  }
  return "?";
}

void SessionLog::append(LogEntry entry) {
  switch (entry.kind) {
    case LogKind::Request:
      requests_.insert(entry.id);
      break;
    case LogKind::Subtask:
      if (!requests_.count(entry.parent_id)) {
        fail(ErrorCode::Reference, "subtask '" + entry.id + "' references unknown request '" +
                                       entry.parent_id + "'");
      }
      subtasks_.insert(entry.id);
      break;
    case LogKind::Tool:
      if (!subtasks_.count(entry.parent_id)) {
        fail(ErrorCode::Reference, "tool entry '" + entry.id + "' references unknown subtask '" +
                                       entry.parent_id + "'");
      }
      break;
  }
  clock_ = std::max(clock_, entry.timestamp);
  entries_.push_back(std::move(entry));
}

std::vector<LogEntry> SessionLog::entries_of(LogKind kind) const {
  std::vector<LogEntry> out;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
               [kind](const LogEntry& e) { return e.kind == kind; });
  return out;
}

SessionLog append_log(SessionLog log, LogEntry entry) {
  log.append(std::move(entry));
  return log;
}

std::string log_entry_to_line(const LogEntry& entry) {
  nlohmann::ordered_json out;
  out["kind"] = std::string(to_string(entry.kind));
  out["id"] = entry.id;
  out["parent"] = entry.parent_id;
  out["outcome"] = entry.outcome;
  out["timestamp"] = entry.timestamp;
  out["payload"] = entry.payload;
  return out.dump();
}

LogEntry log_entry_from_line(std::string_view line) {
  nlohmann::ordered_json json;
  try {
    json = nlohmann::ordered_json::parse(line.begin(), line.end());
    LogEntry entry;
    auto kind = json.at("kind").get<std::string>();
    if (kind == "request") {
      entry.kind = LogKind::Request;
    } else if (kind == "subtask") {
      entry.kind = LogKind::Subtask;
    } else if (kind == "tool") {
      entry.kind = LogKind::Tool;
    } else {
      fail(ErrorCode::Format, "unknown log entry kind '" + kind + "'");
    }
    entry.id = json.at("id").get<std::string>();
    entry.parent_id = json.at("parent").get<std::string>();
    entry.outcome = json.at("outcome").get<std::string>();
    entry.timestamp = json.at("timestamp").get<std::int64_t>();
    entry.payload = json.at("payload").get<std::string>();
    return entry;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("malformed log entry: ") + e.what());
  }
}

void save_log(const SessionLog& log, std::ostream& sink) {
  for (const auto& e : log.entries()) sink << log_entry_to_line(e) << '\n';
  if (!sink) fail(ErrorCode::Io, "failed writing session log");
}

SessionLog load_log(std::istream& source) {
  SessionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      log.append(log_entry_from_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

CaseBank replay_bank(const SessionLog& log) {
  CaseBank bank;
  for (const auto& entry : log.entries()) {
    if (entry.kind == LogKind::Tool && entry.outcome == kRetainOutcome) {
      bank.retain(case_from_line(entry.payload));
    }
  }
  return bank;
}

}  // namespace mathprep::memory
