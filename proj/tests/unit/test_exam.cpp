#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

#include "mathprep/error.hpp"
#include "mathprep/exam/blueprint.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/exam/novelty.hpp"
#include "mathprep/exam/serialize.hpp"
#include "mathprep/harness/inputs.hpp"

using namespace mathprep;
using namespace mathprep::exam;

namespace {

ExamItem mcq(int topic, int key, CognitiveLevel level = CognitiveLevel::Recognition) {
  ExamItem item;
  item.id = make_question_id(topic, Section::I, level);
  item.topic = "topic " + std::to_string(topic);
  item.level = level;
  item.stem = "Pick one";
  item.body = MultipleChoice{{"a", "b", "c", "d"}, key};
  return item;
}

ExamItem tf(std::array<bool, 4> key) {
  ExamItem item;
  item.id = make_question_id(2, Section::II, CognitiveLevel::Comprehension);
  item.topic = "topic 2";
  item.level = CognitiveLevel::Comprehension;
  item.stem = "Judge";
  item.body = TrueFalseGroup{{"s1", "s2", "s3", "s4"}, key};
  return item;
}

ExamItem short_answer(double key, int digits) {
  ExamItem item;
  item.id = make_question_id(3, Section::III, CognitiveLevel::Application);
  item.topic = "topic 3";
  item.level = CognitiveLevel::Application;
  item.stem = "Compute";
  item.body = ShortAnswer{key, digits};
  return item;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("question ids render and parse") {
  const auto id = make_question_id(11, Section::III, CognitiveLevel::Application, 2);
  CHECK(render(id) == "11_III_3_2");
  CHECK(parse_question_id("11_III_3_2") == id);
  CHECK(render(parse_question_id("8_III_3")) == "8_III_3");
  CHECK(parse_question_id("4_I_2").level == CognitiveLevel::Comprehension);
  for (const char* bad : {"", "4", "4_IV_2", "0_I_1", "4_I_4", "x_I_1", "4_I_1_", "4_I_1_-1"}) {
    CHECK_MESSAGE(code_of([&] { parse_question_id(bad); }) == ErrorCode::Format, bad);
  }
  CHECK(code_of([] { make_question_id(0, Section::I, CognitiveLevel::Recognition); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("item invariants reject a format in the wrong section") {
  auto item = mcq(1, 0);
  CHECK_NOTHROW(check_item(item));
  item.id.section = Section::II;
  CHECK(code_of([&] { check_item(item); }) == ErrorCode::Schema);
  auto bad_key = mcq(1, 4);
  CHECK(code_of([&] { check_item(bad_key); }) == ErrorCode::Schema);
}

TEST_CASE("multiple choice grading") {
  const auto item = mcq(1, 2);
  const auto right = grade_item(item, ChoiceResponse{2});
  CHECK(right.fully_correct);
  CHECK(right.points == doctest::Approx(0.25));
  CHECK(grade_item(item, ChoiceResponse{1}).points == 0.0);
  const auto blank = grade_item(item, Unanswered{});
  CHECK_FALSE(blank.answered);
  CHECK(blank.points == 0.0);
  CHECK(code_of([&] { grade_item(item, NumericResponse{1.0}); }) == ErrorCode::Format);
}

TEST_CASE("true/false staircase") {
  const auto item = tf({true, false, true, true});
  const std::array<double, 5> expected{0.0, 0.1, 0.25, 0.5, 1.0};
  for (int wrong = 0; wrong <= 4; ++wrong) {
    std::array<bool, 4> values{true, false, true, true};
    for (int i = 0; i < wrong; ++i) values[static_cast<std::size_t>(i)] = !values[static_cast<std::size_t>(i)];
    const auto s = grade_item(item, TruthResponse{values});
    CHECK(s.correct_parts == 4 - wrong);
    CHECK(s.points == doctest::Approx(expected[static_cast<std::size_t>(4 - wrong)]));
    CHECK(s.fully_correct == (wrong == 0));
  }
  ScoringScheme bad;
  bad.tf_staircase = {0.0, 0.5, 0.25, 0.5, 1.0};
  CHECK(code_of([&] { bad.check(); }) == ErrorCode::Config);
}

TEST_CASE("short answers compare after decimal rounding") {
  CHECK(round_decimal(3.745, 2) == "3.75");
  CHECK(round_decimal(-3.745, 2) == "-3.75");
  CHECK(round_decimal(0.125, 2) == "0.13");
  CHECK(round_decimal(2.5, 0) == "3");
  CHECK(round_decimal(3200, 0) == "3200");
  CHECK(round_decimal(1.005, 2) == "1.01");
  const auto item = short_answer(3.74, 2);
  CHECK(grade_item(item, NumericResponse{3.7449}).fully_correct);
  CHECK(grade_item(item, NumericResponse{3.74}).points == doctest::Approx(0.5));
  CHECK_FALSE(grade_item(item, NumericResponse{3.75}).fully_correct);
  CHECK(code_of([&] { grade_item(item, NumericResponse{NAN}); }) == ErrorCode::Format);
}

TEST_CASE("exam totals and set-level perfection") {
  Exam e{"t", {mcq(1, 0), tf({true, true, false, false}), short_answer(2.0, 0)}, Provenance::Fixture};
  std::vector<Response> keys;
  for (const auto& item : e.items) keys.push_back(key_response(item));
  const auto perfect = score_exam(e, keys);
  CHECK(perfect.set_perfect);
  CHECK(perfect.normalized() == doctest::Approx(100.0));
  CHECK(perfect.max_total == doctest::Approx(0.25 + 1.0 + 0.5));
  keys[0] = ChoiceResponse{3};
  const auto slip = score_exam(e, keys);
  CHECK_FALSE(slip.set_perfect);
  CHECK(slip.section_points[0] == 0.0);
  CHECK(slip.total == doctest::Approx(1.5));
  keys.pop_back();
  CHECK(code_of([&] { score_exam(e, keys); }) == ErrorCode::Format);
}

TEST_CASE("n-gram novelty is a percentage") {
  CHECK(tokenize("  Hello   World\tX ") == std::vector<std::string>{"hello", "world", "x"});
  CHECK(ngrams("a b", 3).size() == 1);
  CHECK(jaccard({}, {}) == 0.0);
  const std::vector<std::string> bank{"the cat sat on the mat"};
  CHECK(novelty_overlap("the cat sat on the mat", bank) == doctest::Approx(100.0));
  CHECK(novelty_overlap("entirely different words appear here", bank) == 0.0);
  // {the cat sat, cat sat on} shared of 6 distinct trigrams.
  CHECK(novelty_overlap("the cat sat on a rug", bank) == doctest::Approx(100.0 * 2.0 / 6.0));
  CHECK(novelty_overlap("anything", std::vector<std::string>{}) == 0.0);
  CHECK(code_of([&] { novelty_overlap("x", bank, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("interchange round trip is byte stable") {
  const auto text = harness::read_file(fixtures::exam_path("compliant_2025"));
  const auto exam = parse_exam(text);
  CHECK(exam.items.size() == 22);
  CHECK(parse_exam(serialize_exam(exam)) == exam);
  CHECK(serialize_exam(parse_exam(serialize_exam(exam))) == serialize_exam(exam));
}

TEST_CASE("schema errors name the offending path") {
  auto json = exam_to_json(fixtures::exam("appendix_a"));
  json["items"][0]["body"]["choices"].erase(0);
  try {
    exam_from_json(json);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    CHECK(std::string(e.what()).find("items[0].body.choices") != std::string::npos);
  }
  CHECK(code_of([] { parse_exam("{not json"); }) == ErrorCode::Schema);
}

TEST_CASE("built-in blueprint matches the fixture file") {
  const auto file = parse_blueprint(harness::read_file(fixtures::dir() / "blueprints" / "default_2025.json"));
  const auto builtin = harness::default_blueprint();
  CHECK(file.profile == builtin.profile);
  CHECK(file.matrix == builtin.matrix);
  CHECK(builtin.matrix.topics().size() == 12);
  CHECK(builtin.matrix.section_total(Section::I) == 12);
  CHECK(builtin.matrix.section_total(Section::II) == 4);
  CHECK(builtin.matrix.section_total(Section::III) == 6);
  CHECK_NOTHROW(builtin.matrix.check_profile(default_profile()));
  CHECK(parse_blueprint(serialize_blueprint(builtin)).matrix == builtin.matrix);
}

TEST_CASE("validation reports extra and missing cells") {
  const auto matrix = harness::default_blueprint().matrix;
  auto exam = fixtures::exam("compliant_2025");
  exam.items[0].topic = "Not in the matrix";
  const auto r = validate_exam(exam, matrix);
  CHECK_FALSE(r.compliant);
  CHECK(r.violations.size() == 2);
  CHECK(r.rate < 1.0);

  const auto perturbed = validate_exam(fixtures::exam("perturbed_2025"), matrix);
  REQUIRE(perturbed.violations.size() == 1);
  CHECK(perturbed.violations[0].required == 1);
  CHECK(perturbed.violations[0].found == 0);
}

TEST_CASE("a matrix breaking the profile totals is rejected") {
  auto bp = harness::default_blueprint();
  BlueprintProfile profile = bp.profile;
  profile.section_totals = {12, 4, 5};
  CHECK(code_of([&] { bp.matrix.check_profile(profile); }) == ErrorCode::Config);
}

TEST_CASE("appendix B items exist in the compliant fixture") {
  const auto exam = fixtures::exam("compliant_2025");
  std::istringstream ids(harness::read_file(fixtures::dir() / "exams" / "appendix_b_ids.txt"));
  std::string id;
  int found = 0;
  while (ids >> id) {
    const auto qid = parse_question_id(id);
    CHECK(qid.section == Section::III);
    for (const auto& item : exam.items) found += item.id == qid ? 1 : 0;
  }
  CHECK(found == 2);
}
