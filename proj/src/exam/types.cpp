#include "mathprep/exam/types.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "mathprep/error.hpp"

namespace mathprep::exam {

std::string_view to_string(Section section) noexcept {
  switch (section) {
    case Section::I: return "I";
    case Section::II: return "II";
    case Section::III: return "III";
  }
  return "?";
}

std::string_view to_string(CognitiveLevel level) noexcept {
  switch (level) {
    case CognitiveLevel::Recognition: return "Recognition";
    case CognitiveLevel::Comprehension: return "Comprehension";
    case CognitiveLevel::Application: return "Application";
  }
  return "?";
}

std::optional<Section> parse_section(std::string_view text) noexcept {
  if (text == "I") return Section::I;
  if (text == "II") return Section::II;
  if (text == "III") return Section::III;
  return std::nullopt;
}

std::optional<CognitiveLevel> level_from_int(int value) noexcept {
  if (value < 1 || value > 3) return std::nullopt;
  return static_cast<CognitiveLevel>(value);
}

QuestionId make_question_id(int topic_code, Section section, CognitiveLevel level, int seq) {
  if (topic_code < 1) {
    fail(ErrorCode::InvalidArgument, "topic_code must be >= 1, got " + std::to_string(topic_code));
  }
  if (seq < 0) fail(ErrorCode::InvalidArgument, "seq must be >= 0");
  return QuestionId{topic_code, section, level, seq};
}

std::string render(const QuestionId& id) {
  std::string out = std::to_string(id.topic_code);
  out += '_';
  out += to_string(id.section);
  out += '_';
  out += std::to_string(to_int(id.level));
  if (id.seq > 0) {
    out += '_';
    out += std::to_string(id.seq);
  }
  return out;
}

namespace {

std::optional<int> parse_int(std::string_view text) {
  if (text.empty() || text.front() == '+' || text.front() == '-') return std::nullopt;
  // Canonical renderings never carry leading zeros.
  if (text.size() > 1 && text.front() == '0') return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

QuestionId parse_question_id(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('_', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  auto bad = [&]() -> QuestionId {
    fail(ErrorCode::Format, "malformed question id '" + std::string(text) + "'");
  };
  if (parts.size() != 3 && parts.size() != 4) return bad();
  auto topic = parse_int(parts[0]);
  auto section = parse_section(parts[1]);
  auto level_num = parse_int(parts[2]);
  if (!topic || !section || !level_num) return bad();
  auto level = level_from_int(*level_num);
  if (!level || *topic < 1) return bad();
  int seq = 0;
  if (parts.size() == 4) {
    auto parsed = parse_int(parts[3]);
    // A zero suffix would not round-trip.
    if (!parsed || *parsed == 0) return bad();
    seq = *parsed;
  }
  return QuestionId{*topic, *section, *level, seq};
}

Section section_for(const ItemBody& body) noexcept {
  switch (body.index()) {
    case 0: return Section::I;
    case 1: return Section::II;
    default: return Section::III;
  }
}

std::string_view body_kind(const ItemBody& body) noexcept {
  switch (body.index()) {
    case 0: return "mcq";
    case 1: return "tf";
    default: return "short";
  }
}

void check_item(const ExamItem& item, std::string_view path) {
  const std::string p(path);
  if (item.id.topic_code < 1) fail(ErrorCode::Schema, p + ".id: topic code must be >= 1");
  if (item.level != item.id.level) {
    fail(ErrorCode::Schema, p + ".level: does not match the level encoded in the id");
  }
  if (section_for(item.body) != item.id.section) {
    fail(ErrorCode::Schema, p + ".body.kind: '" + std::string(body_kind(item.body)) +
                                "' is not allowed in section " +
                                std::string(to_string(item.id.section)));
  }
  if (const auto* mcq = std::get_if<MultipleChoice>(&item.body)) {
    if (mcq->key < 0 || mcq->key > 3) fail(ErrorCode::Schema, p + ".body.key: out of range");
  }
  if (const auto* sa = std::get_if<ShortAnswer>(&item.body)) {
    if (!std::isfinite(sa->key)) fail(ErrorCode::Schema, p + ".body.key: must be finite");
    if (sa->round_digits < 0 || sa->round_digits > 15) {
      fail(ErrorCode::Schema, p + ".body.round_digits: must be in [0, 15]");
    }
  }
}

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::Generated: return "generated";
    case Provenance::Ingested: return "ingested";
    case Provenance::Fixture: return "fixture";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
  if (text == "generated") return Provenance::Generated;
  if (text == "ingested") return Provenance::Ingested;
  if (text == "fixture") return Provenance::Fixture;
  return std::nullopt;
}

void check_exam(const Exam& exam) {
  std::set<QuestionId> seen;
  int last_section = 0;
  for (std::size_t i = 0; i < exam.items.size(); ++i) {
    const auto& item = exam.items[i];
    const std::string path = "items[" + std::to_string(i) + "]";
    check_item(item, path);
    if (!seen.insert(item.id).second) {
      fail(ErrorCode::Schema, path + ".id: duplicate id " + render(item.id));
    }
    int section = static_cast<int>(item.id.section);
    if (section < last_section) {
      fail(ErrorCode::Schema, path + ".section: items must be grouped in section order I, II, III");
    }
    last_section = section;
  }
}

Response key_response(const ExamItem& item) {
  return std::visit(
      [](const auto& body) -> Response {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, MultipleChoice>) {
          return ChoiceResponse{body.key};
        } else if constexpr (std::is_same_v<T, TrueFalseGroup>) {
          return TruthResponse{body.key};
        } else {
          return NumericResponse{body.key};
        }
      },
      item.body);
}

std::string describe(const Response& response) {
  std::ostringstream out;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Unanswered>) {
          out << "UNANSWERED";
        } else if constexpr (std::is_same_v<T, ChoiceResponse>) {
          out << static_cast<char>('A' + r.chosen);
        } else if constexpr (std::is_same_v<T, TruthResponse>) {
          for (std::size_t i = 0; i < 4; ++i) out << (i ? "," : "") << (r.values[i] ? 'T' : 'F');
        } else {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof buf, r.value);
          out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
      },
      response);
  return out.str();
}

}  // namespace mathprep::exam
