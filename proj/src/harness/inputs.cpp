#include "mathprep/harness/inputs.hpp"

#include <fstream>
#include <sstream>

#include "mathprep/error.hpp"

namespace mathprep::harness {

using exam::CognitiveLevel;
using exam::Section;

exam::BlueprintFile default_blueprint() {
  const std::vector<std::string> topics{"Monotonicity and extrema",
                                        "Asymptotes and graphs",
                                        "Maximum and minimum values",
                                        "Grouped data dispersion",
                                        "Vectors in space",
                                        "Antiderivatives and integrals",
                                        "Plane equations in Oxyz",
                                        "Conditional probability",
                                        "Exponential and logarithmic functions",
                                        "Sequences",
                                        "Lines and spheres in Oxyz",
                                        "Spatial angles and distances"};
  constexpr auto R = CognitiveLevel::Recognition;
  constexpr auto C = CognitiveLevel::Comprehension;
  constexpr auto A = CognitiveLevel::Application;
  const CognitiveLevel section_one[12] = {R, R, C, C, R, R, R, C, R, C, R, C};
  std::map<exam::CellKey, int> cells;
  for (int code = 1; code <= 12; ++code) cells[{topics[code - 1], Section::I, section_one[code - 1]}] = 1;
  for (int code : {1, 6, 8, 11}) cells[{topics[code - 1], Section::II, C}] = 1;
  for (int code : {1, 6, 7, 8, 11}) cells[{topics[code - 1], Section::III, A}] = 1;
  cells[{topics[8], Section::III, C}] = 1;
  return exam::BlueprintFile{exam::default_profile(), exam::SpecificationMatrix(topics, cells)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
}

exam::BlueprintFile load_blueprint(const std::string& path) {
  if (path.empty()) return default_blueprint();
  auto bp = exam::parse_blueprint(read_file(path));
  bp.matrix.check_profile(bp.profile);
  return bp;
}

exam::Exam load_exam(const std::filesystem::path& path) {
  return exam::parse_exam(read_file(path));
}

exam::Exam merge_exams(std::span<const exam::Exam> exams, const std::string& exam_id) {
  exam::Exam out;
  out.exam_id = exam_id;
  for (auto section : exam::kSections) {
    for (std::size_t e = 0; e < exams.size(); ++e) {
      for (auto item : exams[e].items) {
        if (item.section() != section) continue;
        item.id.seq = static_cast<int>(e) + 1;
        out.items.push_back(std::move(item));
      }
    }
  }
  exam::check_exam(out);
  return out;
}

}  // namespace mathprep::harness
