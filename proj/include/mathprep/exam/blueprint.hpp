#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mathprep/exam/types.hpp"

namespace mathprep::exam {

struct CellKey {
  std::string topic;
  Section section = Section::I;
  CognitiveLevel level = CognitiveLevel::Recognition;

  auto operator<=>(const CellKey&) const = default;
};

std::string describe(const CellKey& key);

/// Fixed per-section item totals that a matrix must honour.
struct BlueprintProfile {
  std::string name = "2025";
  std::array<int, 3> section_totals{12, 4, 6};

  bool operator==(const BlueprintProfile&) const = default;
};

BlueprintProfile default_profile();

class SpecificationMatrix {
 public:
  SpecificationMatrix() = default;
  SpecificationMatrix(std::vector<std::string> topics, std::map<CellKey, int> cells);

  const std::vector<std::string>& topics() const noexcept { return topics_; }
  const std::map<CellKey, int>& cells() const noexcept { return cells_; }

  int required(const CellKey& key) const;
  bool has_topic(const std::string& topic) const;
  /// 1-based position of the topic in topics(); throws Error(Reference) if absent.
  int topic_code(const std::string& topic) const;
  const std::string& topic_name(int topic_code) const;
  int section_total(Section section) const;
  int total_items() const;

  /// Throws Error(Config) when per-section totals differ from the profile.
  void check_profile(const BlueprintProfile& profile) const;

  bool operator==(const SpecificationMatrix&) const = default;

 private:
  std::vector<std::string> topics_;
  std::map<CellKey, int> cells_;
};

struct Violation {
  CellKey cell;
  int required = 0;
  int found = 0;
  bool operator==(const Violation&) const = default;
};

struct ComplianceReport {
  bool compliant = false;
  std::vector<Violation> violations;
  double rate = 0.0;
};

/// Counts items per (topic, section, level) cell and compares with the matrix.
/// Cells present only in the exam (including topics unknown to the matrix)
/// are reported as violations and count against the rate.
ComplianceReport validate_exam(const Exam& exam, const SpecificationMatrix& matrix);

}  // namespace mathprep::exam
