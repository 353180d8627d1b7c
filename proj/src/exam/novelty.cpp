#include "mathprep/exam/novelty.hpp"

#include <algorithm>

#include "mathprep/error.hpp"

namespace mathprep::exam {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto u = static_cast<unsigned char>(ch);
    if (u == ' ' || u == '\t' || u == '\n' || u == '\r' || u == '\f' || u == '\v') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(u < 0x80 && u >= 'A' && u <= 'Z' ? static_cast<char>(u - 'A' + 'a') : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

NgramCounts ngrams(std::string_view text, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  auto tokens = tokenize(text);
  NgramCounts counts;
  if (tokens.empty()) return counts;
  const auto order = static_cast<std::size_t>(n);
  auto join = [&](std::size_t from, std::size_t len) {
    std::string gram;
    for (std::size_t i = from; i < from + len; ++i) {
      if (i > from) gram.push_back(' ');
      gram += tokens[i];
    }
    return gram;
  };
  if (tokens.size() < order) {
    ++counts[join(0, tokens.size())];
    return counts;
  }
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) ++counts[join(i, order)];
  return counts;
}

double jaccard(const NgramCounts& a, const NgramCounts& b) {
  long long inter = 0;
  long long uni = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      uni += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      uni += ib->second;
      ++ib;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double novelty_overlap(std::string_view stem, std::span<const std::string> bank_stems, int n) {
  auto query = ngrams(stem, n);
  double best = 0.0;
  for (const auto& other : bank_stems) best = std::max(best, jaccard(query, ngrams(other, n)));
  return 100.0 * best;
}

double novelty_overlap(const ExamItem& item, std::span<const ExamItem> bank, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  auto query = ngrams(item.stem, n);
  double best = 0.0;
  for (const auto& other : bank) best = std::max(best, jaccard(query, ngrams(other.stem, n)));
  return 100.0 * best;
}

}  // namespace mathprep::exam
