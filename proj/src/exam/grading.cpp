#include "mathprep/exam/grading.hpp"

#include <charconv>
#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::exam {

void ScoringScheme::check() const {
  if (mcq_points <= 0.0 || short_points <= 0.0 || tf_staircase[4] <= 0.0) {
    fail(ErrorCode::Config, "scoring scheme maxima must be positive");
  }
  if (tf_staircase[0] < 0.0) fail(ErrorCode::Config, "staircase points must be non-negative");
  for (std::size_t k = 1; k < tf_staircase.size(); ++k) {
    if (tf_staircase[k] < tf_staircase[k - 1]) {
      fail(ErrorCode::Config, "true/false staircase must be non-decreasing");
    }
  }
}

double ScoringScheme::max_points(const ItemBody& body) const {
  switch (section_for(body)) {
    case Section::I: return mcq_points;
    case Section::II: return tf_staircase[4];
    case Section::III: return short_points;
  }
  return 0.0;
}

std::string round_decimal(double value, int digits) {
  if (!std::isfinite(value)) fail(ErrorCode::Format, "cannot round a non-finite value");
  if (digits < 0) fail(ErrorCode::InvalidArgument, "round digits must be >= 0");

  // Shortest round-trip decimal text of the value, then decimal rounding
  // half away from zero on that text.
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::fixed);
  std::string text(buf, res.ptr);
  auto dot = text.find('.');
  std::string int_part = dot == std::string::npos ? text : text.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);

  const auto want = static_cast<std::size_t>(digits);
  bool round_up = frac.size() > want && frac[want] >= '5';
  frac.resize(want, '0');
  std::string digits_only = int_part + frac;
  if (round_up) {
    int i = static_cast<int>(digits_only.size()) - 1;
    for (; i >= 0; --i) {
      if (digits_only[static_cast<std::size_t>(i)] == '9') {
        digits_only[static_cast<std::size_t>(i)] = '0';
      } else {
        ++digits_only[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) digits_only.insert(digits_only.begin(), '1');
  }
  std::string out = digits_only.substr(0, digits_only.size() - want);
  if (want > 0) out += "." + digits_only.substr(digits_only.size() - want);

  bool all_zero = out.find_first_not_of("0.") == std::string::npos;
  if (std::signbit(value) && !all_zero) out.insert(out.begin(), '-');
  return out;
}

namespace {

[[noreturn]] void mismatch(const ExamItem& item, const Response& response) {
  fail(ErrorCode::Format, "response " + describe(response) + " does not match the " +
                              std::string(body_kind(item.body)) + " body of item " +
                              render(item.id));
}

}  // namespace

ItemScore grade_item(const ExamItem& item, const Response& response, const ScoringScheme& scheme) {
  ItemScore score;
  score.max_points = scheme.max_points(item.body);
  if (std::holds_alternative<Unanswered>(response)) {
    score.answered = false;
    return score;
  }

  if (const auto* mcq = std::get_if<MultipleChoice>(&item.body)) {
    const auto* r = std::get_if<ChoiceResponse>(&response);
    if (!r) mismatch(item, response);
    if (r->chosen < 0 || r->chosen > 3) fail(ErrorCode::Format, "choice index out of range");
    score.fully_correct = r->chosen == mcq->key;
    score.correct_parts = score.fully_correct ? 1 : 0;
    score.points = score.fully_correct ? scheme.mcq_points : 0.0;
  } else if (const auto* tf = std::get_if<TrueFalseGroup>(&item.body)) {
    const auto* r = std::get_if<TruthResponse>(&response);
    if (!r) mismatch(item, response);
    for (std::size_t i = 0; i < 4; ++i) score.correct_parts += r->values[i] == tf->key[i] ? 1 : 0;
    score.points = scheme.tf_staircase[static_cast<std::size_t>(score.correct_parts)];
    score.fully_correct = score.correct_parts == 4;
  } else {
    const auto& sa = std::get<ShortAnswer>(item.body);
    const auto* r = std::get_if<NumericResponse>(&response);
    if (!r) mismatch(item, response);
    if (!std::isfinite(r->value)) {
      fail(ErrorCode::Format, "non-finite short answer for item " + render(item.id));
    }
    score.fully_correct =
        round_decimal(r->value, sa.round_digits) == round_decimal(sa.key, sa.round_digits);
    score.correct_parts = score.fully_correct ? 1 : 0;
    score.points = score.fully_correct ? scheme.short_points : 0.0;
  }
  return score;
}

ExamScore score_exam(const Exam& exam, std::span<const Response> responses,
                     const ScoringScheme& scheme) {
  if (responses.size() != exam.items.size()) {
    fail(ErrorCode::Format, "exam has " + std::to_string(exam.items.size()) + " items but " +
                                std::to_string(responses.size()) + " responses were given");
  }
  ExamScore result;
  result.items.reserve(exam.items.size());
  result.set_perfect = true;
  for (std::size_t i = 0; i < exam.items.size(); ++i) {
    const auto& item = exam.items[i];
    auto score = grade_item(item, responses[i], scheme);
    auto s = section_index(item.id.section);
    result.section_points[s] += score.points;
    result.section_max[s] += score.max_points;
    result.total += score.points;
    result.max_total += score.max_points;
    result.set_perfect = result.set_perfect && score.fully_correct;
    result.items.push_back(score);
  }
  if (exam.items.empty()) result.set_perfect = false;
  return result;
}

}  // namespace mathprep::exam
