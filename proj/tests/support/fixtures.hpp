#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "mathprep/exam/types.hpp"
#include "mathprep/harness/inputs.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return MATHPREP_FIXTURE_DIR; }

inline std::filesystem::path exam_path(const std::string& name) {
  return dir() / "exams" / (name + ".json");
}

inline mathprep::exam::Exam exam(const std::string& name) {
  return mathprep::harness::load_exam(exam_path(name));
}

inline std::vector<std::string> mock_set_paths(int count = 10) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) {
    std::string n = std::to_string(i);
    if (n.size() < 2) n = "0" + n;
    out.push_back(exam_path("mock_set_" + n).string());
  }
  return out;
}

// Assessment battery: the compliant fixture plus four mock sets.
inline std::vector<mathprep::exam::Exam> battery() {
  std::vector<mathprep::exam::Exam> out{exam("compliant_2025")};
  for (const auto& p : mock_set_paths(4)) out.push_back(mathprep::harness::load_exam(p));
  return out;
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("mathprep-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
