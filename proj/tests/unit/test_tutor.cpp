#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "mathprep/agents/tutor.hpp"
#include "mathprep/error.hpp"
#include "mathprep/harness/inputs.hpp"

using namespace mathprep;
using namespace mathprep::agents;

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

SkillOntology default_ontology() { return SkillOntology::per_topic(harness::default_blueprint().matrix); }

// Responses that get exactly the listed items wrong.
exam::ExamScore score_with_misses(const exam::Exam& e, const std::vector<std::string>& wrong) {
  std::vector<exam::Response> responses;
  for (const auto& item : e.items) {
    const bool miss = std::find(wrong.begin(), wrong.end(), exam::render(item.id)) != wrong.end();
    responses.push_back(miss ? exam::Response{exam::Unanswered{}} : exam::key_response(item));
  }
  return exam::score_exam(e, responses);
}

}  // namespace

TEST_CASE("per-topic ontology covers the matrix") {
  const auto matrix = harness::default_blueprint().matrix;
  const auto ontology = SkillOntology::per_topic(matrix);
  CHECK(ontology.skills().size() == matrix.topics().size());
  CHECK_NOTHROW(ontology.check_covers(matrix));
  const auto& topic = matrix.topics()[2];
  for (auto level : exam::kLevels) CHECK(ontology.skill_for(topic, level) == "S3");
  CHECK_FALSE(ontology.skill_for("Unknown topic", exam::CognitiveLevel::Recognition).has_value());
  CHECK(code_of([] { SkillOntology({{"S1", "t", exam::CognitiveLevel::Recognition}},
                                   {{{"t", exam::CognitiveLevel::Recognition}, {"S9"}}}); }) ==
        ErrorCode::Reference);
  SkillOntology partial({{"S1", matrix.topics()[0], exam::CognitiveLevel::Recognition}},
                        {{{matrix.topics()[0], exam::CognitiveLevel::Recognition}, {"S1"}}});
  CHECK(code_of([&] { partial.check_covers(matrix); }) == ErrorCode::Reference);
}

TEST_CASE("a true/false group yields one attempt per statement") {
  const auto e = fixtures::exam("compliant_2025");
  const auto attempts = skill_attempts(e, score_with_misses(e, {}), default_ontology());
  // 12 + 6 single attempts and 4 groups of four.
  CHECK(attempts.size() == 12 + 6 + 4 * 4);
  for (const auto& a : attempts) CHECK(a.correct);
}

TEST_CASE("gap analysis ranks skills by error rate") {
  const auto e = fixtures::exam("compliant_2025");
  const auto ontology = default_ontology();
  // Topic 6 owns 6_I_1, 6_II_2 and 6_III_3; topic 1 owns 1_I_1, 1_II_2 and 1_III_3.
  const auto score = score_with_misses(e, {"6_I_1", "6_II_2", "6_III_3", "1_I_1"});
  const auto report = analyze_errors(e, score, ontology);
  REQUIRE_FALSE(report.gaps.empty());
  CHECK(report.gaps.front() == "S6");
  CHECK(report.severity("S6") == doctest::Approx(1.0));
  CHECK(report.severity("S1") == doctest::Approx(1.0 / 6.0));
  CHECK(report.unmapped.empty());
  for (std::size_t i = 1; i < report.gaps.size(); ++i) {
    CHECK(report.severity(report.gaps[i - 1]) >= report.severity(report.gaps[i]));
  }

  auto stray = e;
  stray.items[0].topic = "Unmapped topic";
  const auto with_stray = analyze_errors(stray, score, ontology);
  CHECK(with_stray.unmapped == std::vector<std::string>{exam::render(stray.items[0].id)});
}

TEST_CASE("practice units round-trip through actions") {
  const PracticeUnit unit{"S3", 32, exam::CognitiveLevel::Application};
  CHECK(unit_from_action(unit_action(unit)) == unit);
  CHECK(unit_text(unit).find("S3") != std::string::npos);
  CHECK(code_of([] { unit_from_action({"do something", {}}); }) == ErrorCode::Format);
  PracticeProposer proposer(32, 0.8);
  CHECK(proposer.candidates("S2").size() == 3);
  const auto p = proposer.propose({"focus S2", {{"focus", "S2"}}}, nullptr);
  double total = 0.0;
  for (const auto& wa : p) total += wa.probability;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("plans follow the gap order and explain themselves") {
  const auto e = fixtures::exam("compliant_2025");
  const auto ontology = default_ontology();
  const auto gaps = analyze_errors(e, score_with_misses(e, {"6_I_1", "6_II_2", "6_III_3", "7_I_1", "7_III_3"}),
                                   ontology);
  retrieval::HashingEmbedder embedder;
  mmdp::CbrMemory memory(embedder);
  StudentProfile profile{"s", {}, {}};
  std::vector<PathDecision> decisions;
  const auto plan = recommend_path(profile, gaps, ontology, memory, {}, 1, &decisions);
  REQUIRE(plan.units.size() == gaps.gaps.size());
  for (std::size_t i = 0; i < plan.units.size(); ++i) CHECK(plan.units[i].skill_id == gaps.gaps[i]);
  CHECK(decisions.size() == plan.units.size());
  CHECK(plan.rationale.find("gap") != std::string::npos);

  const auto none = recommend_path(profile, GapReport{}, ontology, memory, {}, 1);
  CHECK(none.units.empty());
  CHECK(none.rationale.find("no gaps") != std::string::npos);
  GapReport bogus;
  bogus.gaps = {"S99"};
  CHECK(code_of([&] { recommend_path(profile, bogus, ontology, memory, {}, 1); }) == ErrorCode::Reference);
}

TEST_CASE("simulated students answer at the guess-adjusted rate") {
  CHECK(guess_floor(exam::Section::I) == 0.25);
  CHECK(guess_floor(exam::Section::II) == 0.5);
  CHECK(guess_floor(exam::Section::III) == 0.0);
  const auto e = fixtures::exam("compliant_2025");
  const auto ontology = default_ontology();
  const auto& item = e.items[0];
  const auto skill = *ontology.skill_for(item.topic, item.level);
  StudentProfile profile{"s", {{skill, 0.2}}, {}};
  mmdp::Rng rng(8);
  int correct = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto step = simulate_student_step(profile, item, ontology, rng);
    correct += exam::grade_item(item, step.response).fully_correct ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / n == doctest::Approx(0.25 + 0.75 * 0.2).epsilon(0.05));

  const auto practiced = simulate_student_step(profile, item, ontology, rng, StudentMode::Practice, 0.1);
  CHECK(practiced.profile.mastery.at(skill) == doctest::Approx(0.2 + 0.1 * 0.8));
  CHECK(practiced.profile.history.size() == 1);
  auto orphan = item;
  orphan.topic = "Nowhere";
  CHECK(code_of([&] { simulate_student_step(profile, orphan, ontology, rng); }) == ErrorCode::Simulation);
}

TEST_CASE("tutoring metrics skip students without a post assessment") {
  StudentHistory a;
  a.student_id = "a";
  a.pre.score = 40;
  a.pre.attempts = {{"1", "S1", false}, {"2", "S1", false}, {"3", "S2", false}, {"4", "S2", false}};
  a.post = Assessment{};
  a.post->score = 70;
  a.post->attempts = {{"1", "S1", false}, {"2", "S1", false}, {"3", "S2", true}};
  StudentHistory b;
  b.student_id = "b";
  b.pre.score = 10;
  const std::vector<StudentHistory> histories{a, b};
  const auto m = tutoring_metrics(histories);
  CHECK(m.delta_score == doctest::Approx(30.0));
  CHECK(m.repeated_before == 2);
  CHECK(m.repeated_after == 1);
  CHECK(m.path_effectiveness == doctest::Approx(50.0));
  REQUIRE(m.flags.size() == 1);
  CHECK(m.flags[0].find("b") == 0);
  CHECK(repeated_error_skills(a.pre.attempts) ==
        oracle::repeated_errors({{"S1", false}, {"S1", false}, {"S2", false}, {"S2", false}}));
}

TEST_CASE("cohort histories round-trip and reproduce the metrics") {
  const auto battery = harness::merge_exams(fixtures::battery(), "battery");
  const auto ontology = default_ontology();
  retrieval::HashingEmbedder embedder;
  mmdp::CbrMemory memory(embedder);
  CohortConfig cfg;
  cfg.students = 6;
  cfg.seed = 21;
  const auto cohort = run_tutoring_cohort(battery, ontology, memory, cfg);
  CHECK(cohort.histories.size() == 6);
  CHECK(cohort.histories[0].student_id == "student-01");
  std::size_t units = 0;
  for (const auto& h : cohort.histories) units += h.plan.units.size();
  CHECK(memory.bank().size() == units);
  CHECK(cohort.retained_case_ids.size() == units);

  std::stringstream io;
  write_histories(cohort.histories, io);
  const auto back = read_histories(io);
  const auto again = tutoring_metrics(back);
  CHECK(again.student_deltas == cohort.metrics.student_deltas);
  CHECK(again.delta_score == cohort.metrics.delta_score);
  CHECK(again.path_effectiveness == cohort.metrics.path_effectiveness);

  mmdp::CbrMemory twin_memory(embedder);
  const auto twin = run_tutoring_cohort(battery, ontology, twin_memory, cfg);
  CHECK(twin.metrics.student_deltas == cohort.metrics.student_deltas);
  cfg.students = 0;
  CHECK(code_of([&] { run_tutoring_cohort(battery, ontology, memory, cfg); }) == ErrorCode::Config);
}
