#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mathprep/agents/tutor.hpp"
#include "mathprep/exam/blueprint.hpp"
#include "mathprep/exam/grading.hpp"

namespace mathprep::harness {

enum class MetricSource { Computed, Recorded, Unavailable };
std::string_view to_string(MetricSource source) noexcept;

struct Metric {
  std::optional<double> value;
  MetricSource source = MetricSource::Unavailable;

  static Metric computed(double v) { return {v, MetricSource::Computed}; }
  static Metric recorded(double v) { return {v, MetricSource::Recorded}; }
  static Metric unavailable() { return {}; }
  bool operator==(const Metric&) const = default;
};

/// Percentages are on a 0..100 scale, latency in seconds.
struct MetricsReport {
  Metric item_accuracy;
  Metric set_level_accuracy;
  std::array<Metric, 3> section_accuracy;
  Metric hard_item_accuracy;  // Application-level items
  Metric compliance_rate;
  Metric mean_novelty;
  Metric step_completeness;  // proxy: answered items with >= S worked steps
  Metric delta_score;
  Metric path_effectiveness;
  Metric latency_mean;
  Metric latency_p95;
  Metric explanation_quality;  // human ratings, passed through
  Metric teacher_rating;

  bool operator==(const MetricsReport&) const = default;
};

/// One solved and graded exam. `steps` holds the worked-steps text per item
/// and may be empty when the solver kept none.
struct GradedExam {
  exam::Exam exam;
  exam::ExamScore score;
  std::vector<std::string> steps;
  std::optional<double> latency_seconds;
};

struct MetricsInput {
  std::vector<GradedExam> graded;
  std::vector<exam::ComplianceReport> compliance;
  std::vector<double> novelty;  // per generated item, percent
  std::optional<agents::TutoringMetrics> tutoring;
};

struct MetricsConfig {
  int step_threshold = 2;
};

/// Non-empty lines of a worked-steps text.
int count_steps(std::string_view steps);

/// Nearest-rank percentile of a non-empty sample, p in (0, 100].
double percentile(std::vector<double> sample, double p);

/// Fields with no underlying data are unavailable rather than zero.
/// Throws Error(Shape) when a graded exam's score or steps do not align with
/// its items.
MetricsReport compute_metrics(const MetricsInput& input, const MetricsConfig& config = {});

/// `normalize` nulls the wall-clock fields and keeps their provenance.
nlohmann::ordered_json to_json(const MetricsReport& report, bool normalize = false);
MetricsReport metrics_from_json(const nlohmann::ordered_json& json);

/// Two-column text table: metric, value, provenance.
std::string render_table(const MetricsReport& report);

}  // namespace mathprep::harness
