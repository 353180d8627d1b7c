#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mathprep::memory {

using Annotations = std::map<std::string, std::string>;

/// One episodic experience (s, a, r, s').
struct Case {
  std::string case_id;
  std::string state_text;
  std::string action_text;
  double reward = 0.0;
  std::optional<std::string> next_state_text;
  bool success = false;
  std::int64_t created_seq = 0;
  Annotations annotations;

  bool operator==(const Case&) const = default;
};

/// Online-growing, append-only case store. Copies are independent
/// snapshots; a single writer appends through retain().
class CaseBank {
 public:
  CaseBank() = default;
  explicit CaseBank(std::optional<std::size_t> size_cap) : size_cap_(size_cap) {}

  /// Validates and adopts an existing sequence of cases (ids unique,
  /// created_seq strictly increasing, finite rewards).
  static CaseBank from_cases(std::vector<Case> cases, std::optional<std::size_t> size_cap = {});

  /// Appends a case. created_seq == 0 is assigned next_seq(); an explicit
  /// value must exceed the last one. Failed experiences are kept too.
  /// Throws Error(Conflict) on a duplicate id or non-increasing seq,
  /// Error(Domain) on a non-finite reward, Error(Capacity) past the cap.
  const Case& retain(Case c);

  std::size_t size() const noexcept { return cases_.size(); }
  bool empty() const noexcept { return cases_.empty(); }
  const std::vector<Case>& cases() const noexcept { return cases_; }
  const Case& at(std::size_t index) const { return cases_.at(index); }
  const Case* find(const std::string& case_id) const;
  std::optional<std::size_t> index_of(const std::string& case_id) const;
  bool contains(const std::string& case_id) const { return index_.count(case_id) > 0; }
  std::int64_t next_seq() const noexcept {
    return cases_.empty() ? 1 : cases_.back().created_seq + 1;
  }
  std::optional<std::size_t> size_cap() const noexcept { return size_cap_; }

  bool operator==(const CaseBank& other) const { return cases_ == other.cases_; }

 private:
  std::vector<Case> cases_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::size_t> size_cap_;
};

/// Functional form: returns a new bank with the case appended.
CaseBank retain(CaseBank bank, Case c);

}  // namespace mathprep::memory
