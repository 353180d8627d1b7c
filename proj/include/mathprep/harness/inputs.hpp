#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "mathprep/exam/serialize.hpp"
#include "mathprep/exam/types.hpp"

namespace mathprep::harness {

/// The 2025 matrix: twelve topics, 12/4/6 items.
exam::BlueprintFile default_blueprint();

/// Throws Error(Io).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

/// Empty path: the built-in default.
exam::BlueprintFile load_blueprint(const std::string& path);
exam::Exam load_exam(const std::filesystem::path& path);

/// Concatenates exams into one assessment, section by section. Item ids get
/// the exam's 1-based position as their sequence suffix so they stay unique.
exam::Exam merge_exams(std::span<const exam::Exam> exams, const std::string& exam_id);

}  // namespace mathprep::harness
