#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mathprep/exam/types.hpp"

namespace mathprep::exam {

using NgramCounts = std::map<std::string, int>;

/// Lowercases ASCII letters and splits on whitespace. Non-ASCII bytes are
/// kept as-is (text is an opaque UTF-8 payload).
std::vector<std::string> tokenize(std::string_view text);

/// Multiset of word n-grams. A text with fewer than n tokens contributes its
/// whole token sequence as a single gram.
NgramCounts ngrams(std::string_view text, int n);

/// Multiset Jaccard: sum of min counts over sum of max counts; 0 when both empty.
double jaccard(const NgramCounts& a, const NgramCounts& b);

/// 100 x max Jaccard overlap against the bank; 0 for an empty bank.
/// Throws Error(InvalidArgument) when n < 1.
double novelty_overlap(const ExamItem& item, std::span<const ExamItem> bank, int n = 3);
double novelty_overlap(std::string_view stem, std::span<const std::string> bank_stems, int n = 3);

}  // namespace mathprep::exam
