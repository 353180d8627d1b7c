#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "mathprep/error.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/harness/ablation.hpp"
#include "mathprep/harness/inputs.hpp"
#include "mathprep/harness/metrics.hpp"
#include "mathprep/harness/pipeline.hpp"
#include "mathprep/harness/report.hpp"
#include "mathprep/harness/run_config.hpp"

using namespace mathprep;
using namespace mathprep::harness;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// Every fourth item is left unanswered.
GradedExam graded_with_gaps(const exam::Exam& e) {
  std::vector<exam::Response> responses;
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    responses.push_back(i % 4 == 0 ? exam::Response{exam::Unanswered{}} : exam::key_response(e.items[i]));
  }
  GradedExam g{e, exam::score_exam(e, responses), {}, std::nullopt};
  // Zero, one or two worked steps, rotating.
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    g.steps.push_back(i % 3 == 1 ? "a" : i % 3 == 2 ? "a\nb\n" : "");
  }
  return g;
}

}  // namespace

TEST_CASE("run configs round-trip and reject unknown keys") {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.retrieval = {retrieval::RetrievalMode::ReadNP, 2, 0.5, 16};
  cfg.exams = {"a.json", "b.json"};
  cfg.normalize = true;
  CHECK(run_config_from_json(to_json(cfg)) == cfg);
  CHECK(run_config_from_json(nlohmann::ordered_json::object()) == RunConfig{});
  CHECK(code_of([] { run_config_from_json({{"sede", 1}}); }) == ErrorCode::Config);
  RunConfig bad;
  bad.students = 0;
  CHECK(code_of([&] { bad.check(); }) == ErrorCode::Config);
}

TEST_CASE("merged exams keep unique ids and section order") {
  const auto battery = fixtures::battery();
  const auto merged = merge_exams(battery, "m");
  CHECK(merged.items.size() == 22 * battery.size());
  std::vector<std::string> ids;
  for (const auto& item : merged.items) ids.push_back(exam::render(item.id));
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  CHECK(std::is_sorted(merged.items.begin(), merged.items.end(), [](const auto& a, const auto& b) {
    return exam::section_index(a.section()) < exam::section_index(b.section());
  }));
  CHECK(merged.items.front().id.seq == 1);
  CHECK(merged.items.back().id.seq == static_cast<int>(battery.size()));
}

TEST_CASE("metrics agree with a direct recount") {
  const auto a = fixtures::exam("compliant_2025");
  const auto b = fixtures::exam("mock_set_01");
  MetricsInput input;
  input.graded = {graded_with_gaps(a), graded_with_gaps(b)};
  input.graded[0].latency_seconds = 2.0;
  input.graded[1].latency_seconds = 4.0;

  long items = 0, correct = 0, hard = 0, hard_correct = 0, answered = 0, complete = 0;
  for (const auto& g : input.graded) {
    for (std::size_t i = 0; i < g.exam.items.size(); ++i) {
      ++items;
      const bool ok = g.score.items[i].fully_correct;
      correct += ok;
      if (g.exam.items[i].level == exam::CognitiveLevel::Application) {
        ++hard;
        hard_correct += ok;
      }
      if (g.score.items[i].answered) {
        ++answered;
        const auto& s = g.steps[i];
        const auto lines = std::count(s.begin(), s.end(), '\n') + (!s.empty() && s.back() != '\n');
        complete += lines >= 2;
      }
    }
  }
  const auto m = compute_metrics(input);
  CHECK(m.item_accuracy.value == doctest::Approx(100.0 * correct / items));
  CHECK(m.hard_item_accuracy.value == doctest::Approx(100.0 * hard_correct / hard));
  CHECK(m.step_completeness.value == doctest::Approx(100.0 * complete / answered));
  CHECK(m.set_level_accuracy.value == doctest::Approx(0.0));
  CHECK(m.latency_mean.value == doctest::Approx(3.0));
  CHECK(m.item_accuracy.source == MetricSource::Computed);

  CHECK(m.compliance_rate.source == MetricSource::Unavailable);
  CHECK(m.mean_novelty.source == MetricSource::Unavailable);
  CHECK(m.delta_score.source == MetricSource::Unavailable);
  CHECK(m.explanation_quality.source == MetricSource::Unavailable);

  auto broken = input;
  broken.graded[0].score.items.pop_back();
  CHECK(code_of([&] { compute_metrics(broken); }) == ErrorCode::Shape);
  broken = input;
  broken.graded[1].steps.resize(3);
  CHECK(code_of([&] { compute_metrics(broken); }) == ErrorCode::Shape);
}

TEST_CASE("human ratings pass through as recorded values") {
  auto e = fixtures::exam("appendix_a");
  e.items[0].ratings_json = R"({"explanation_quality": 4, "teacher_rating": 3})";
  e.items[1].ratings_json = R"({"explanation_quality": 2})";
  MetricsInput input;
  input.graded = {graded_with_gaps(e)};
  const auto m = compute_metrics(input);
  CHECK(m.explanation_quality == Metric::recorded(3.0));
  CHECK(m.teacher_rating == Metric::recorded(3.0));
}

TEST_CASE("percentile and step counting") {
  std::mt19937_64 gen(5);
  for (int n : {1, 2, 7, 20, 101}) {
    const auto sample = oracle::random_vector(gen, n, 0.0, 10.0);
    for (double p : {1.0, 50.0, 95.0, 100.0}) CHECK(percentile(sample, p) == oracle::percentile(sample, p));
  }
  CHECK(code_of([] { percentile({}, 50.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { percentile({1.0}, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(count_steps("") == 0);
  CHECK(count_steps("one\n\n  \ntwo\nthree") == 3);
}

TEST_CASE("metrics JSON round-trips and normalizing nulls only timing") {
  MetricsReport r;
  r.item_accuracy = Metric::computed(75.0);
  r.explanation_quality = Metric::recorded(4.5);
  r.latency_mean = Metric::computed(1.25);
  r.latency_p95 = Metric::computed(2.5);
  CHECK(metrics_from_json(to_json(r)) == r);
  const auto normalized = metrics_from_json(to_json(r, true));
  CHECK(normalized.item_accuracy == r.item_accuracy);
  CHECK_FALSE(normalized.latency_mean.value.has_value());
  CHECK(normalized.latency_mean.source == MetricSource::Computed);
  CHECK(render_table(r).find("item_accuracy") != std::string::npos);
}

TEST_CASE("the report hash names the experiment, not the run") {
  nlohmann::ordered_json report = {{"command", "eval"},
                                   {"config", {{"seed", 7}, {"out", "dir-a"}, {"normalize", false}}},
                                   {"metrics", {{"latency_mean", {{"value", 1.5}}}, {"accuracy", 80}}},
                                   {"wall_clock_s", 3.0}};
  const auto base = report_hash(report);
  CHECK(base.size() == 16);
  auto moved = report;
  moved["config"]["out"] = "dir-b";
  moved["config"]["normalize"] = true;
  moved["wall_clock_s"] = 9.0;
  moved["metrics"]["latency_mean"]["value"] = 7.0;
  CHECK(report_hash(moved) == base);
  auto changed = report;
  changed["config"]["seed"] = 8;
  CHECK(report_hash(changed) != base);

  const auto sealed = seal_report(report, true);
  CHECK(sealed["report_hash"] == base);
  CHECK(sealed["normalized"] == true);
  CHECK(sealed["wall_clock_s"].is_null());
  CHECK(report_hash(sealed) == base);
  CHECK(is_timing_key("latency_p95_s"));
  CHECK_FALSE(is_timing_key("accuracy"));
}

TEST_CASE("a variant whose backend throws yields a failed row") {
  const std::vector<exam::Exam> exams{fixtures::exam("mock_set_01")};
  const auto workload = designed_workload(exams);
  AblationConfig cfg;
  int calls = 0;
  cfg.backend = [&](const AblationWorkload& w) -> std::unique_ptr<agents::ChatBackend> {
    if (++calls == 2) throw std::runtime_error("backend down");
    return mock_factory(w);
  };
  const auto variants = memory_variants();
  const auto rows = run_ablation(workload, variants, cfg);
  REQUIRE(rows.size() == 3);
  CHECK_FALSE(rows[0].failed);
  CHECK(rows[1].failed);
  CHECK(rows[1].error.find("backend down") != std::string::npos);
  CHECK_FALSE(rows[1].accuracy.has_value());
  CHECK_FALSE(rows[2].failed);
  CHECK(rows[2].accuracy.has_value());
  CHECK(render_ablation_table(rows).find("readnp") != std::string::npos);
}

TEST_CASE("error codes map to exit statuses") {
  CHECK(exit_code_for(ErrorCode::Config) == kExitUsage);
  CHECK(exit_code_for(ErrorCode::InvalidArgument) == kExitUsage);
  CHECK(exit_code_for(ErrorCode::Schema) == kExitSchema);
  CHECK(exit_code_for(ErrorCode::Format) == kExitSchema);
  CHECK(exit_code_for(ErrorCode::Unsupported) == kExitSchema);
  CHECK(exit_code_for(ErrorCode::Backend) == kExitBackend);
  CHECK(exit_code_for(ErrorCode::Io) == kExitOther);
}

TEST_CASE("outputs land under the output directory") {
  fixtures::ScratchDir dir("outputs");
  CommandResult result;
  result.report = {{"command", "test"}};
  result.table = "table\n";
  result.artifacts = {{"extra/notes.txt", "hello"}};
  write_outputs(result, dir.str("out"));
  CHECK(std::filesystem::exists(dir.path() / "out" / "report.json"));
  CHECK(read_file(dir.path() / "out" / "report.txt") == "table\n");
  CHECK(read_file(dir.path() / "out" / "extra" / "notes.txt") == "hello");
  CHECK(nlohmann::json::parse(read_file(dir.path() / "out" / "report.json"))["command"] == "test");
}
