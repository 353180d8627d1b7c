#pragma once

#include <string_view>
#include <vector>

#include "mathprep/exam/types.hpp"

namespace mathprep::agents {

/// Accepts already-extracted exam text in one of two layouts.
///
/// Interchange JSON (first non-space byte '{'): items pass through unchanged.
///
/// Plain text: blocks separated by blank lines, one item per block.
///
///   ITEM 4_I_2
///   TOPIC: Grouped data dispersion
///   STEM: first line of the stem
///   more stem lines (LaTeX is kept verbatim)
///   A. choice      (Section I: exactly A. to D.)
///   a) statement   (Section II: exactly a) to d))
///   KEY: B | T,F,T,T | 3200
///   ROUND: 2       (Section III, optional)
///   SOLUTION: optional, may continue on following lines
///
/// The section comes from the id. Binary or PDF input throws
/// Error(Unsupported); an unrecognized block throws Error(Format) naming the
/// block and its first line number.
std::vector<exam::ExamItem> normalize_input(std::string_view document);

}  // namespace mathprep::agents
