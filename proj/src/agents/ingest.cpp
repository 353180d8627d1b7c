#include "mathprep/agents/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "mathprep/error.hpp"
#include "mathprep/exam/serialize.hpp"

namespace mathprep::agents {

namespace {

bool looks_binary(std::string_view doc) {
  if (doc.substr(0, 5) == "%PDF-") return true;
  for (unsigned char c : doc) {
    if (c == 0 || (c < 0x20 && c != '\n' && c != '\r' && c != '\t')) return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

struct Block {
  std::size_t index;
  std::vector<Line> lines;
};

std::vector<Block> blocks_of(std::string_view doc) {
  std::vector<Block> blocks;
  Block current{1, {}};
  std::size_t start = 0;
  std::size_t number = 0;
  while (start <= doc.size()) {
    auto pos = doc.find('\n', start);
    auto raw = doc.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (trim(raw).empty()) {
      if (!current.lines.empty()) {
        blocks.push_back(current);
        current = Block{blocks.size() + 1, {}};
      }
    } else {
      current.lines.push_back({number, raw});
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (!current.lines.empty()) blocks.push_back(current);
  return blocks;
}

[[noreturn]] void bad_block(const Block& b, std::size_t line, const std::string& why) {
  fail(ErrorCode::Format, "block " + std::to_string(b.index) + " (line " + std::to_string(line) +
                              "): " + why);
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

exam::ExamItem parse_block(const Block& b) {
  const auto& first = b.lines.front();
  if (!starts_with(first.text, "ITEM ")) bad_block(b, first.number, "expected 'ITEM <id>'");
  exam::ExamItem item;
  try {
    item.id = exam::parse_question_id(trim(first.text.substr(5)));
  } catch (const Error& e) {
    bad_block(b, first.number, e.what());
  }
  item.level = item.id.level;

  enum class Field { None, Stem, Solution };
  Field open = Field::None;
  std::array<std::string, 4> options;
  std::array<bool, 4> seen{};
  std::string key;
  int round_digits = 2;
  for (std::size_t i = 1; i < b.lines.size(); ++i) {
    const auto& [number, text] = b.lines[i];
    auto option_index = [&]() -> int {
      if (text.size() < 2) return -1;
      const char c = text[0];
      const char d = text[1];
      if (item.id.section == exam::Section::I && c >= 'A' && c <= 'D' && d == '.') return c - 'A';
      if (item.id.section == exam::Section::II && c >= 'a' && c <= 'd' && d == ')') return c - 'a';
      return -1;
    }();
    if (starts_with(text, "TOPIC:")) {
      item.topic = std::string(trim(text.substr(6)));
      open = Field::None;
    } else if (starts_with(text, "STEM:")) {
      item.stem = std::string(trim(text.substr(5)));
      open = Field::Stem;
    } else if (starts_with(text, "KEY:")) {
      key = std::string(trim(text.substr(4)));
      open = Field::None;
    } else if (starts_with(text, "ROUND:")) {
      auto v = trim(text.substr(6));
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), round_digits);
      if (ec != std::errc{} || p != v.data() + v.size()) bad_block(b, number, "bad ROUND value");
      open = Field::None;
    } else if (starts_with(text, "SOLUTION:")) {
      item.solution = std::string(trim(text.substr(9)));
      open = Field::Solution;
    } else if (option_index >= 0) {
      if (seen[option_index]) bad_block(b, number, "duplicate option");
      seen[option_index] = true;
      options[option_index] = std::string(trim(text.substr(2)));
      open = Field::None;
    } else if (open == Field::Stem) {
      item.stem += "\n" + std::string(text);
    } else if (open == Field::Solution) {
      item.solution += "\n" + std::string(text);
    } else {
      bad_block(b, number, "unrecognized line '" + std::string(text.substr(0, 40)) + "'");
    }
  }
  if (item.topic.empty()) bad_block(b, first.number, "missing TOPIC");
  if (item.stem.empty()) bad_block(b, first.number, "missing STEM");
  if (key.empty()) bad_block(b, first.number, "missing KEY");

  switch (item.id.section) {
    case exam::Section::I: {
      for (bool s : seen) {
        if (!s) bad_block(b, first.number, "a Section I item needs options A. to D.");
      }
      if (key.size() != 1 || key[0] < 'A' || key[0] > 'D') bad_block(b, first.number, "KEY must be A-D");
      item.body = exam::MultipleChoice{options, key[0] - 'A'};
      break;
    }
    case exam::Section::II: {
      for (bool s : seen) {
        if (!s) bad_block(b, first.number, "a Section II item needs statements a) to d)");
      }
      exam::TrueFalseGroup tf{options, {}};
      std::size_t k = 0;
      for (char c : key) {
        if (c == ',' || c == ' ') continue;
        if ((c != 'T' && c != 'F') || k == 4) bad_block(b, first.number, "KEY must be four of T/F");
        tf.key[k++] = c == 'T';
      }
      if (k != 4) bad_block(b, first.number, "KEY must be four of T/F");
      item.body = tf;
      break;
    }
    case exam::Section::III: {
      if (std::any_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
        bad_block(b, first.number, "a Section III item takes no options");
      }
      double value = 0.0;
      auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
      if (ec != std::errc{} || p != key.data() + key.size() || !std::isfinite(value)) {
        bad_block(b, first.number, "KEY must be a decimal number");
      }
      item.body = exam::ShortAnswer{value, round_digits};
      break;
    }
  }
  try {
    exam::check_item(item, "block " + std::to_string(b.index));
  } catch (const Error& e) {
    bad_block(b, first.number, e.what());
  }
  return item;
}

}  // namespace

std::vector<exam::ExamItem> normalize_input(std::string_view document) {
  if (looks_binary(document)) {
    fail(ErrorCode::Unsupported,
         "binary or PDF input is not supported; supply extracted text or interchange JSON");
  }
  const auto body = trim(document);
  if (body.empty()) fail(ErrorCode::Format, "empty document");
  if (body.front() == '{') return exam::parse_exam(body).items;
  std::vector<exam::ExamItem> items;
  for (const auto& block : blocks_of(document)) items.push_back(parse_block(block));
  return items;
}

}  // namespace mathprep::agents
