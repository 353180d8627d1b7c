#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mathprep::exam {

enum class CognitiveLevel : int { Recognition = 1, Comprehension = 2, Application = 3 };

enum class Section : int { I = 1, II = 2, III = 3 };

inline constexpr std::array<Section, 3> kSections{Section::I, Section::II, Section::III};
inline constexpr std::array<CognitiveLevel, 3> kLevels{
    CognitiveLevel::Recognition, CognitiveLevel::Comprehension, CognitiveLevel::Application};

std::string_view to_string(Section section) noexcept;
std::string_view to_string(CognitiveLevel level) noexcept;
std::optional<Section> parse_section(std::string_view text) noexcept;
std::optional<CognitiveLevel> level_from_int(int value) noexcept;
inline int to_int(CognitiveLevel level) noexcept { return static_cast<int>(level); }
inline std::size_t section_index(Section section) noexcept {
  return static_cast<std::size_t>(section) - 1;
}

/// Canonical form "<topic>_<section>_<level>" with an optional "_<seq>"
/// suffix; seq == 0 means no suffix.
struct QuestionId {
  int topic_code = 1;
  Section section = Section::I;
  CognitiveLevel level = CognitiveLevel::Recognition;
  int seq = 0;

  auto operator<=>(const QuestionId&) const = default;
};

/// Throws Error(InvalidArgument) when topic_code < 1 or seq < 0.
QuestionId make_question_id(int topic_code, Section section, CognitiveLevel level, int seq = 0);
std::string render(const QuestionId& id);
/// Throws Error(Format) on malformed text.
QuestionId parse_question_id(std::string_view text);

struct MultipleChoice {
  std::array<std::string, 4> choices;
  int key = 0;  // 0..3 maps to A..D
  bool operator==(const MultipleChoice&) const = default;
};

struct TrueFalseGroup {
  std::array<std::string, 4> statements;
  std::array<bool, 4> key{};
  bool operator==(const TrueFalseGroup&) const = default;
};

struct ShortAnswer {
  double key = 0.0;
  int round_digits = 2;
  bool operator==(const ShortAnswer&) const = default;
};

using ItemBody = std::variant<MultipleChoice, TrueFalseGroup, ShortAnswer>;

/// The format each section requires.
Section section_for(const ItemBody& body) noexcept;
std::string_view body_kind(const ItemBody& body) noexcept;

struct ExamItem {
  QuestionId id;
  std::string topic;
  CognitiveLevel level = CognitiveLevel::Recognition;
  std::string stem;
  ItemBody body;
  std::string solution;
  std::string explanation;
  // Human ratings are carried verbatim as a JSON text blob; never derived.
  std::string ratings_json;

  Section section() const noexcept { return id.section; }
  bool operator==(const ExamItem&) const = default;
};

/// Checks per-item invariants; throws Error(Schema) naming `path`.
void check_item(const ExamItem& item, std::string_view path = "item");

enum class Provenance { Generated, Ingested, Fixture };
std::string_view to_string(Provenance provenance) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;

struct Exam {
  std::string exam_id;
  std::vector<ExamItem> items;
  Provenance provenance = Provenance::Fixture;

  bool operator==(const Exam&) const = default;
};

/// Unique ids, section order I, II, III and per-item invariants.
void check_exam(const Exam& exam);

// Responses mirror the body variants. Unanswered scores zero.
struct Unanswered {
  bool operator==(const Unanswered&) const = default;
};
struct ChoiceResponse {
  int chosen = 0;
  bool operator==(const ChoiceResponse&) const = default;
};
struct TruthResponse {
  std::array<bool, 4> values{};
  bool operator==(const TruthResponse&) const = default;
};
struct NumericResponse {
  double value = 0.0;
  bool operator==(const NumericResponse&) const = default;
};
using Response = std::variant<Unanswered, ChoiceResponse, TruthResponse, NumericResponse>;

/// The response that a fully correct candidate would give.
Response key_response(const ExamItem& item);
std::string describe(const Response& response);

}  // namespace mathprep::exam
