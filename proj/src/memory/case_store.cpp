#include "mathprep/memory/case_store.hpp"

#include <istream>
#include <ostream>

#include "mathprep/error.hpp"

namespace mathprep::memory {

using nlohmann::ordered_json;

ordered_json case_to_json(const Case& c) {
  ordered_json out;
  out["case_id"] = c.case_id;
  out["created_seq"] = c.created_seq;
  out["state"] = c.state_text;
  out["action"] = c.action_text;
  out["reward"] = c.reward;
  out["next_state"] = c.next_state_text ? ordered_json(*c.next_state_text) : ordered_json(nullptr);
  out["success"] = c.success;
  out["annotations"] = ordered_json::object();
  for (const auto& [k, v] : c.annotations) out["annotations"][k] = v;
  return out;
}

namespace {

const ordered_json& require(const ordered_json& json, const char* name) {
  auto it = json.find(name);
  if (it == json.end()) fail(ErrorCode::Format, std::string("missing field '") + name + "'");
  return *it;
}

std::string require_string(const ordered_json& json, const char* name) {
  const auto& v = require(json, name);
  if (!v.is_string()) fail(ErrorCode::Format, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Case case_from_json(const ordered_json& json) {
  if (!json.is_object()) fail(ErrorCode::Format, "case must be a JSON object");
  Case c;
  c.case_id = require_string(json, "case_id");
  const auto& seq = require(json, "created_seq");
  if (!seq.is_number_integer()) fail(ErrorCode::Format, "field 'created_seq' must be an integer");
  c.created_seq = seq.get<std::int64_t>();
  c.state_text = require_string(json, "state");
  c.action_text = require_string(json, "action");
  const auto& reward = require(json, "reward");
  if (!reward.is_number()) fail(ErrorCode::Format, "field 'reward' must be a number");
  c.reward = reward.get<double>();
  const auto& next = require(json, "next_state");
  if (next.is_string()) {
    c.next_state_text = next.get<std::string>();
  } else if (!next.is_null()) {
    fail(ErrorCode::Format, "field 'next_state' must be a string or null");
  }
  const auto& success = require(json, "success");
  if (!success.is_boolean()) fail(ErrorCode::Format, "field 'success' must be a boolean");
  c.success = success.get<bool>();
  if (auto it = json.find("annotations"); it != json.end()) {
    if (!it->is_object()) fail(ErrorCode::Format, "field 'annotations' must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) fail(ErrorCode::Format, "annotation values must be strings");
      c.annotations[k] = v.get<std::string>();
    }
  }
  return c;
}

std::string case_to_line(const Case& c) { return case_to_json(c).dump(); }

Case case_from_line(std::string_view line) {
  ordered_json json;
  try {
    json = ordered_json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Format, std::string("invalid JSON: ") + e.what());
  }
  return case_from_json(json);
}

void save_bank(const CaseBank& bank, std::ostream& sink) {
  for (const auto& c : bank.cases()) sink << case_to_line(c) << '\n';
  if (!sink) fail(ErrorCode::Io, "failed writing case bank");
}

void save_bank(const CaseBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  save_bank(bank, out);
}

LoadResult load_bank(std::istream& source, const LoadOptions& options) {
  LoadResult result{CaseBank(options.size_cap), false, 0};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const bool terminated = !source.eof();
    if (line.empty() && terminated) continue;
    Case c;
    try {
      c = case_from_line(line);
    } catch (const Error& e) {
      if (!terminated && options.tolerate_partial_trailing_line) {
        result.dropped_partial_line = true;
        result.dropped_line_number = line_no;
        break;
      }
      fail(ErrorCode::Format, "line " + std::to_string(line_no) + ": " + e.what() +
                                  (terminated ? "" : " (partial trailing line)"));
    }
    try {
      result.bank.retain(std::move(c));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

LoadResult load_bank(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return load_bank(in, options);
}

CaseBankFile::CaseBankFile(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::app) {
  if (!out_) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for append");
}

void CaseBankFile::append(const Case& c) {
  out_ << case_to_line(c) << '\n';
  out_.flush();
  if (!out_) fail(ErrorCode::Io, "failed appending to '" + path_.string() + "'");
}

}  // namespace mathprep::memory
