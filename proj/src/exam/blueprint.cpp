#include "mathprep/exam/blueprint.hpp"

#include <algorithm>
#include <set>

#include "mathprep/error.hpp"

namespace mathprep::exam {

std::string describe(const CellKey& key) {
  return "(" + key.topic + ", " + std::string(to_string(key.section)) + ", " +
         std::string(to_string(key.level)) + ")";
}

BlueprintProfile default_profile() { return BlueprintProfile{}; }

SpecificationMatrix::SpecificationMatrix(std::vector<std::string> topics,
                                         std::map<CellKey, int> cells)
    : topics_(std::move(topics)), cells_(std::move(cells)) {
  std::set<std::string> unique(topics_.begin(), topics_.end());
  if (unique.size() != topics_.size()) fail(ErrorCode::Config, "duplicate topic in matrix");
  for (const auto& [key, count] : cells_) {
    if (!unique.count(key.topic)) {
      fail(ErrorCode::Config, "matrix cell " + describe(key) + " references an unknown topic");
    }
    if (count < 0) fail(ErrorCode::Config, "matrix cell " + describe(key) + " has a negative count");
  }
}

int SpecificationMatrix::required(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? 0 : it->second;
}

bool SpecificationMatrix::has_topic(const std::string& topic) const {
  return std::find(topics_.begin(), topics_.end(), topic) != topics_.end();
}

int SpecificationMatrix::topic_code(const std::string& topic) const {
  auto it = std::find(topics_.begin(), topics_.end(), topic);
  if (it == topics_.end()) fail(ErrorCode::Reference, "unknown topic '" + topic + "'");
  return static_cast<int>(it - topics_.begin()) + 1;
}

const std::string& SpecificationMatrix::topic_name(int topic_code) const {
  if (topic_code < 1 || topic_code > static_cast<int>(topics_.size())) {
    fail(ErrorCode::Reference, "unknown topic code " + std::to_string(topic_code));
  }
  return topics_[static_cast<std::size_t>(topic_code - 1)];
}

int SpecificationMatrix::section_total(Section section) const {
  int total = 0;
  for (const auto& [key, count] : cells_) {
    if (key.section == section) total += count;
  }
  return total;
}

int SpecificationMatrix::total_items() const {
  int total = 0;
  for (const auto& [key, count] : cells_) total += count;
  return total;
}

void SpecificationMatrix::check_profile(const BlueprintProfile& profile) const {
  for (auto section : kSections) {
    int expected = profile.section_totals[section_index(section)];
    int actual = section_total(section);
    if (expected != actual) {
      fail(ErrorCode::Config, "profile '" + profile.name + "' requires " +
                                  std::to_string(expected) + " items in section " +
                                  std::string(to_string(section)) + ", matrix has " +
                                  std::to_string(actual));
    }
  }
}

ComplianceReport validate_exam(const Exam& exam, const SpecificationMatrix& matrix) {
  std::map<CellKey, int> found;
  for (const auto& item : exam.items) {
    ++found[CellKey{item.topic, item.id.section, item.level}];
  }

  if (std::none_of(matrix.cells().begin(), matrix.cells().end(),
                   [](const auto& cell) { return cell.second > 0; })) {
    fail(ErrorCode::InvalidArgument, "matrix has no required cells");
  }

  ComplianceReport report;
  int denominator = 0;
  int matched = 0;
  for (const auto& [key, required] : matrix.cells()) {
    if (required <= 0) continue;
    ++denominator;
    auto it = found.find(key);
    int count = it == found.end() ? 0 : it->second;
    if (count == required) {
      ++matched;
    } else {
      report.violations.push_back({key, required, count});
    }
  }
  // Items landing in cells the matrix does not ask for.
  for (const auto& [key, count] : found) {
    if (matrix.required(key) > 0) continue;
    ++denominator;
    report.violations.push_back({key, 0, count});
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const Violation& a, const Violation& b) { return a.cell < b.cell; });

  report.rate = static_cast<double>(matched) / static_cast<double>(denominator);
  report.compliant = report.violations.empty();
  return report;
}

}  // namespace mathprep::exam
