#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mathprep/memory/case_bank.hpp"

namespace mathprep::memory {

// Bank files are UTF-8 JSON Lines, one case per line with keys in the order
// case_id, created_seq, state, action, reward, next_state, success, annotations.

nlohmann::ordered_json case_to_json(const Case& c);
/// Throws Error(Format) describing the first bad field.
Case case_from_json(const nlohmann::ordered_json& json);
std::string case_to_line(const Case& c);
Case case_from_line(std::string_view line);

struct LoadOptions {
  // When set, an unterminated final line that fails to parse is dropped and
  // reported instead of raising.
  bool tolerate_partial_trailing_line = false;
  std::optional<std::size_t> size_cap;
};

struct LoadResult {
  CaseBank bank;
  bool dropped_partial_line = false;
  std::size_t dropped_line_number = 0;
};

void save_bank(const CaseBank& bank, std::ostream& sink);
void save_bank(const CaseBank& bank, const std::filesystem::path& path);

/// Throws Error(Format) naming the 1-based line number of a malformed line,
/// Error(Conflict) on duplicate ids.
LoadResult load_bank(std::istream& source, const LoadOptions& options = {});
LoadResult load_bank(const std::filesystem::path& path, const LoadOptions& options = {});

/// Append-only bank file: each retain becomes one appended line.
class CaseBankFile {
 public:
  explicit CaseBankFile(const std::filesystem::path& path);
  void append(const Case& c);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace mathprep::memory
