#include "mathprep/harness/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mathprep/error.hpp"

namespace mathprep::harness {

std::string_view to_string(MetricSource source) noexcept {
  switch (source) {
    case MetricSource::Computed: return "computed";
    case MetricSource::Recorded: return "recorded";
    case MetricSource::Unavailable: return "unavailable";
  }
  return "unavailable";
}

int count_steps(std::string_view steps) {
  int n = 0;
  std::size_t pos = 0;
  while (pos <= steps.size()) {
    auto end = steps.find('\n', pos);
    if (end == std::string_view::npos) end = steps.size();
    auto line = steps.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) ++n;
    pos = end + 1;
  }
  return n;
}

double percentile(std::vector<double> sample, double p) {
  if (sample.empty()) fail(ErrorCode::InvalidArgument, "percentile of an empty sample");
  if (!(p > 0.0 && p <= 100.0)) fail(ErrorCode::InvalidArgument, "percentile must lie in (0, 100]");
  std::sort(sample.begin(), sample.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sample.size())));
  return sample[std::max<std::size_t>(rank, 1) - 1];
}

namespace {

Metric ratio(long num, long den) {
  if (den == 0) return Metric::unavailable();
  return Metric::computed(100.0 * static_cast<double>(num) / static_cast<double>(den));
}

Metric mean_of(const std::vector<double>& xs, MetricSource source) {
  if (xs.empty()) return Metric::unavailable();
  double sum = 0.0;
  for (double x : xs) sum += x;
  return Metric{sum / static_cast<double>(xs.size()), source};
}

// Ratings are an opaque JSON blob per item; numeric fields pass through.
void collect_rating(const std::string& blob, const char* key, std::vector<double>& out) {
  if (blob.empty()) return;
  auto j = nlohmann::json::parse(blob, nullptr, false);
  if (j.is_object() && j.contains(key) && j[key].is_number()) out.push_back(j[key].get<double>());
}

}  // namespace

MetricsReport compute_metrics(const MetricsInput& input, const MetricsConfig& config) {
  MetricsReport r;
  long items = 0, correct = 0, perfect = 0, hard = 0, hard_correct = 0;
  long answered = 0, complete = 0;
  bool any_steps = false;
  std::array<long, 3> sec_items{}, sec_correct{};
  std::vector<double> latencies, explanation, teacher;
  for (const auto& g : input.graded) {
    if (g.score.items.size() != g.exam.items.size()) {
      fail(ErrorCode::Shape, "exam '" + g.exam.exam_id + "' has " + std::to_string(g.exam.items.size()) +
                                 " items but " + std::to_string(g.score.items.size()) + " scores");
    }
    if (!g.steps.empty() && g.steps.size() != g.exam.items.size()) {
      fail(ErrorCode::Shape, "exam '" + g.exam.exam_id + "' steps do not align with its items");
    }
    bool all = !g.exam.items.empty();
    for (std::size_t i = 0; i < g.exam.items.size(); ++i) {
      const auto& item = g.exam.items[i];
      const auto& s = g.score.items[i];
      const auto sec = exam::section_index(item.section());
      ++items;
      ++sec_items[sec];
      if (s.fully_correct) {
        ++correct;
        ++sec_correct[sec];
      } else {
        all = false;
      }
      if (item.level == exam::CognitiveLevel::Application) {
        ++hard;
        if (s.fully_correct) ++hard_correct;
      }
      if (!g.steps.empty()) {
        any_steps = true;
        if (s.answered) {
          ++answered;
          if (count_steps(g.steps[i]) >= config.step_threshold) ++complete;
        }
      }
      collect_rating(item.ratings_json, "explanation_quality", explanation);
      collect_rating(item.ratings_json, "teacher_rating", teacher);
    }
    if (all) ++perfect;
    if (g.latency_seconds) latencies.push_back(*g.latency_seconds);
  }
  r.item_accuracy = ratio(correct, items);
  r.set_level_accuracy = ratio(perfect, static_cast<long>(input.graded.size()));
  for (std::size_t s = 0; s < 3; ++s) r.section_accuracy[s] = ratio(sec_correct[s], sec_items[s]);
  r.hard_item_accuracy = ratio(hard_correct, hard);
  r.step_completeness = any_steps ? ratio(complete, answered) : Metric::unavailable();

  std::vector<double> rates;
  for (const auto& c : input.compliance) rates.push_back(100.0 * c.rate);
  r.compliance_rate = mean_of(rates, MetricSource::Computed);
  r.mean_novelty = mean_of(input.novelty, MetricSource::Computed);

  if (input.tutoring) {
    if (input.tutoring->delta_score) r.delta_score = Metric::computed(*input.tutoring->delta_score);
    if (input.tutoring->path_effectiveness) {
      r.path_effectiveness = Metric::computed(*input.tutoring->path_effectiveness);
    }
  }
  if (!latencies.empty()) {
    r.latency_mean = mean_of(latencies, MetricSource::Computed);
    r.latency_p95 = Metric::computed(percentile(latencies, 95.0));
  }
  r.explanation_quality = mean_of(explanation, MetricSource::Recorded);
  r.teacher_rating = mean_of(teacher, MetricSource::Recorded);
  return r;
}

namespace {

using Field = std::pair<const char*, Metric MetricsReport::*>;

const std::vector<Field>& scalar_fields() {
  static const std::vector<Field> fields{
      {"item_accuracy", &MetricsReport::item_accuracy},
      {"set_level_accuracy", &MetricsReport::set_level_accuracy},
      {"hard_item_accuracy", &MetricsReport::hard_item_accuracy},
      {"compliance_rate", &MetricsReport::compliance_rate},
      {"mean_novelty", &MetricsReport::mean_novelty},
      {"step_completeness", &MetricsReport::step_completeness},
      {"delta_score", &MetricsReport::delta_score},
      {"path_effectiveness", &MetricsReport::path_effectiveness},
      {"latency_mean_s", &MetricsReport::latency_mean},
      {"latency_p95_s", &MetricsReport::latency_p95},
      {"explanation_quality", &MetricsReport::explanation_quality},
      {"teacher_rating", &MetricsReport::teacher_rating}};
  return fields;
}

constexpr const char* kSectionKeys[3] = {"section_i_accuracy", "section_ii_accuracy",
                                         "section_iii_accuracy"};

bool is_timing(std::string_view key) { return key.rfind("latency", 0) == 0; }

nlohmann::ordered_json metric_json(const Metric& m, bool null_value) {
  nlohmann::ordered_json j;
  j["value"] = m.value && !null_value ? nlohmann::ordered_json(*m.value) : nlohmann::ordered_json(nullptr);
  j["provenance"] = to_string(m.source);
  return j;
}

Metric metric_from(const nlohmann::ordered_json& j, const std::string& key) {
  if (!j.contains(key)) fail(ErrorCode::Format, "metrics lack '" + key + "'");
  const auto& m = j.at(key);
  Metric out;
  const auto source = m.at("provenance").get<std::string>();
  if (source == "computed") out.source = MetricSource::Computed;
  else if (source == "recorded") out.source = MetricSource::Recorded;
  else if (source == "unavailable") out.source = MetricSource::Unavailable;
  else fail(ErrorCode::Format, "metric '" + key + "' has unknown provenance '" + source + "'");
  if (!m.at("value").is_null()) out.value = m.at("value").get<double>();
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricsReport& report, bool normalize) {
  nlohmann::ordered_json j;
  const auto& fields = scalar_fields();
  j[fields[0].first] = metric_json(report.*fields[0].second, false);
  j[fields[1].first] = metric_json(report.*fields[1].second, false);
  for (std::size_t s = 0; s < 3; ++s) j[kSectionKeys[s]] = metric_json(report.section_accuracy[s], false);
  for (std::size_t f = 2; f < fields.size(); ++f) {
    j[fields[f].first] = metric_json(report.*fields[f].second, normalize && is_timing(fields[f].first));
  }
  return j;
}

MetricsReport metrics_from_json(const nlohmann::ordered_json& j) {
  MetricsReport r;
  try {
    for (const auto& [key, member] : scalar_fields()) r.*member = metric_from(j, key);
    for (std::size_t s = 0; s < 3; ++s) r.section_accuracy[s] = metric_from(j, kSectionKeys[s]);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("bad metrics: ") + e.what());
  }
  return r;
}

namespace {

std::string format_value(const Metric& m) {
  if (!m.value) return "-";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, *m.value, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_table(const MetricsReport& report) {
  std::vector<std::pair<std::string, const Metric*>> rows;
  const auto& fields = scalar_fields();
  rows.emplace_back(fields[0].first, &(report.*fields[0].second));
  rows.emplace_back(fields[1].first, &(report.*fields[1].second));
  for (std::size_t s = 0; s < 3; ++s) rows.emplace_back(kSectionKeys[s], &report.section_accuracy[s]);
  for (std::size_t f = 2; f < fields.size(); ++f) rows.emplace_back(fields[f].first, &(report.*fields[f].second));
  std::size_t w = 6;
  for (const auto& row : rows) w = std::max(w, row.first.size());
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  out << pad("metric", w) << "  " << pad("value", 12) << "  provenance\n";
  for (const auto& [name, m] : rows) {
    out << pad(name, w) << "  " << pad(format_value(*m), 12) << "  " << to_string(m->source) << '\n';
  }
  return out.str();
}

}  // namespace mathprep::harness
