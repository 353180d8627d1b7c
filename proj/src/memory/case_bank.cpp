#include "mathprep/memory/case_bank.hpp"

#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::memory {

CaseBank CaseBank::from_cases(std::vector<Case> cases, std::optional<std::size_t> size_cap) {
  CaseBank bank(size_cap);
  bank.cases_.reserve(cases.size());
  for (auto& c : cases) {
    if (c.created_seq <= 0) {
      fail(ErrorCode::Conflict, "case '" + c.case_id + "' has no created_seq");
    }
    bank.retain(std::move(c));
  }
  return bank;
}

const Case& CaseBank::retain(Case c) {
  if (c.case_id.empty()) fail(ErrorCode::InvalidArgument, "case id must be non-empty");
  if (!std::isfinite(c.reward)) {
    fail(ErrorCode::Domain, "case '" + c.case_id + "' has a non-finite reward");
  }
  if (index_.count(c.case_id)) fail(ErrorCode::Conflict, "duplicate case id '" + c.case_id + "'");
  if (size_cap_ && cases_.size() >= *size_cap_) {
    fail(ErrorCode::Capacity, "case bank is at its size cap of " + std::to_string(*size_cap_));
  }
  if (c.created_seq == 0) {
    c.created_seq = next_seq();
  } else if (!cases_.empty() && c.created_seq <= cases_.back().created_seq) {
    fail(ErrorCode::Conflict, "created_seq of case '" + c.case_id + "' is not increasing");
  }
  index_.emplace(c.case_id, cases_.size());
  cases_.push_back(std::move(c));
  return cases_.back();
}

const Case* CaseBank::find(const std::string& case_id) const {
  auto it = index_.find(case_id);
  return it == index_.end() ? nullptr : &cases_[it->second];
}

std::optional<std::size_t> CaseBank::index_of(const std::string& case_id) const {
  auto it = index_.find(case_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CaseBank retain(CaseBank bank, Case c) {
  bank.retain(std::move(c));
  return bank;
}

}  // namespace mathprep::memory
