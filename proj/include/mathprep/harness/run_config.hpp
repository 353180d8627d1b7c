#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mathprep/retrieval/retrieval.hpp"

namespace mathprep::harness {

/// Everything needed to rerun an experiment. Embedded verbatim in every
/// report; paths are stored as given.
struct RunConfig {
  std::uint64_t seed = 7;
  retrieval::RetrievalConfig retrieval{retrieval::RetrievalMode::ReadP, 4, 1.0, 32};
  std::string profile = "2025";
  std::string blueprint;  // empty: built-in default matrix
  std::string backend = "mock";
  std::string bank;  // directory with bank.jsonl and estimator.json; empty: fresh memory
  std::string out = "mathprep-out";
  std::vector<std::string> exams;      // inputs; empty: generate exam_count exams
  std::vector<std::string> reference;  // novelty reference exams
  int exam_count = 1;
  bool mock_knows_items = true;  // the mock learns the keys of every exam it solves
  int step_threshold = 2;
  // Tutoring cohort.
  int students = 20;
  double eta = 0.1;
  int items_per_unit = 32;
  double mastery_low = 0.0;
  double mastery_high = 0.4;
  // Q training.
  int updates = 5000;
  double step_size = 0.5;
  double td_alpha = 0.01;  // soft backup temperature for train-q
  // Drops wall-clock fields from reports so reruns compare byte for byte.
  bool normalize = false;

  /// Throws Error(Config).
  void check() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys throw Error(Config).
RunConfig run_config_from_json(const nlohmann::ordered_json& json);
RunConfig load_run_config(const std::string& path);

}  // namespace mathprep::harness
