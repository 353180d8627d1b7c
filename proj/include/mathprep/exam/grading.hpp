#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mathprep/exam/types.hpp"

namespace mathprep::exam {

/// Point weights per section. tf_staircase[k] is awarded for k correct
/// statements and must be non-decreasing in k.
struct ScoringScheme {
  double mcq_points = 0.25;
  std::array<double, 5> tf_staircase{0.0, 0.1, 0.25, 0.5, 1.0};
  double short_points = 0.5;

  void check() const;
  double max_points(const ItemBody& body) const;
};

struct ItemScore {
  double points = 0.0;
  double max_points = 0.0;
  int correct_parts = 0;
  bool fully_correct = false;
  bool answered = true;
};

struct ExamScore {
  std::vector<ItemScore> items;
  std::array<double, 3> section_points{};
  std::array<double, 3> section_max{};
  double total = 0.0;
  double max_total = 0.0;
  bool set_perfect = false;

  /// Total on a 0..100 scale.
  double normalized() const { return max_total > 0.0 ? 100.0 * total / max_total : 0.0; }
};

/// Rounds half away from zero at the decimal level of the shortest
/// representation, then renders exactly `digits` fractional digits.
std::string round_decimal(double value, int digits);

/// Throws Error(Format) on variant mismatch or a non-finite numeric response.
ItemScore grade_item(const ExamItem& item, const Response& response,
                     const ScoringScheme& scheme = {});

/// Throws Error(Format) when responses.size() != exam.items.size().
ExamScore score_exam(const Exam& exam, std::span<const Response> responses,
                     const ScoringScheme& scheme = {});

}  // namespace mathprep::exam
