#include "mathprep/agents/backend.hpp"

#include <algorithm>
#include <cctype>

namespace mathprep::agents {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

}  // namespace

std::string Prompt::render() const {
  std::string out = "TASK: " + task + "\n";
  for (const auto& [k, v] : headers) out += k + ": " + one_line(v) + "\n";
  out += "\n";
  out += body;
  return out;
}

std::optional<std::string> Prompt::header(std::string_view key) const {
  for (const auto& [k, v] : headers) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<Prompt> parse_prompt(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0].substr(0, 6) != "TASK: ") return std::nullopt;
  Prompt p;
  p.task = std::string(trim(lines[0].substr(6)));
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    auto colon = lines[i].find(": ");
    if (colon == std::string_view::npos) return std::nullopt;
    p.headers.emplace_back(std::string(lines[i].substr(0, colon)),
                           from_one_line(lines[i].substr(colon + 2)));
  }
  for (++i; i < lines.size(); ++i) {
    p.body += lines[i];
    if (i + 1 < lines.size()) p.body += '\n';
  }
  return p;
}

std::optional<std::string> extract_answer(std::string_view completion) {
  std::optional<std::string> out;
  for (auto line : split_lines(completion)) {
    auto t = trim(line);
    if (t.substr(0, 7) == "ANSWER:") out = std::string(trim(t.substr(7)));
  }
  return out;
}

std::vector<std::string> extract_steps(std::string_view completion) {
  std::vector<std::string> steps;
  for (auto line : split_lines(completion)) {
    auto t = trim(line);
    if (t.substr(0, 7) == "ANSWER:") break;
    if (t.size() < 4) continue;
    std::string head(t.substr(0, 4));
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (head == "step") steps.emplace_back(t);
  }
  return steps;
}

std::string one_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string from_one_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      if (text[i + 1] == 'n') {
        out += '\n';
        ++i;
        continue;
      }
      if (text[i + 1] == '\\') {
        out += '\\';
        ++i;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mathprep::agents
