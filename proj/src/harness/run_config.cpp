#include "mathprep/harness/run_config.hpp"

#include <fstream>
#include <set>

#include "mathprep/error.hpp"

namespace mathprep::harness {

void RunConfig::check() const {
  retrieval.check();
  if (backend != "mock" && backend != "http") {
    fail(ErrorCode::Config, "backend must be mock or http, got '" + backend + "'");
  }
  if (exam_count < 1) fail(ErrorCode::Config, "exam_count must be >= 1");
  if (step_threshold < 1) fail(ErrorCode::Config, "step_threshold must be >= 1");
  if (students < 1) fail(ErrorCode::Config, "students must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::Config, "eta must lie in [0, 1]");
  if (items_per_unit < 1) fail(ErrorCode::Config, "items_per_unit must be >= 1");
  if (!(mastery_low >= 0.0 && mastery_low <= mastery_high && mastery_high <= 1.0)) {
    fail(ErrorCode::Config, "mastery range must satisfy 0 <= low <= high <= 1");
  }
  if (updates < 0) fail(ErrorCode::Config, "updates must be >= 0");
  if (!(step_size >= 0.0)) fail(ErrorCode::Config, "step_size must be >= 0");
  if (!(td_alpha > 0.0)) fail(ErrorCode::Config, "td_alpha must be > 0");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["retrieval"] = {{"mode", retrieval::to_string(c.retrieval.mode)},
                    {"k", c.retrieval.k},
                    {"alpha", c.retrieval.alpha},
                    {"k_pre", c.retrieval.k_pre}};
  j["profile"] = c.profile;
  j["blueprint"] = c.blueprint;
  j["backend"] = c.backend;
  j["bank"] = c.bank;
  j["out"] = c.out;
  j["exams"] = c.exams;
  j["reference"] = c.reference;
  j["exam_count"] = c.exam_count;
  j["mock_knows_items"] = c.mock_knows_items;
  j["step_threshold"] = c.step_threshold;
  j["students"] = c.students;
  j["eta"] = c.eta;
  j["items_per_unit"] = c.items_per_unit;
  j["mastery_low"] = c.mastery_low;
  j["mastery_high"] = c.mastery_high;
  j["updates"] = c.updates;
  j["step_size"] = c.step_size;
  j["td_alpha"] = c.td_alpha;
  j["normalize"] = c.normalize;
  return j;
}

namespace {

template <typename T>
void read(const nlohmann::ordered_json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Config, std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::ordered_json& j) {
  static const std::set<std::string> known{
      "seed",     "retrieval",  "profile",          "blueprint",      "backend",  "bank",
      "out",      "exams",      "reference",        "exam_count",     "mock_knows_items",
      "step_threshold", "students", "eta",          "items_per_unit", "mastery_low",
      "mastery_high",   "updates",  "step_size",    "td_alpha",  "normalize"};
  if (!j.is_object()) fail(ErrorCode::Config, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) fail(ErrorCode::Config, "unknown config key '" + key + "'");
  }
  RunConfig c;
  read(j, "seed", c.seed);
  if (j.contains("retrieval")) {
    const auto& r = j.at("retrieval");
    if (!r.is_object()) fail(ErrorCode::Config, "config key 'retrieval' must be an object");
    for (const auto& [key, value] : r.items()) {
      if (key != "mode" && key != "k" && key != "alpha" && key != "k_pre") {
        fail(ErrorCode::Config, "unknown retrieval key '" + key + "'");
      }
    }
    std::string mode(retrieval::to_string(c.retrieval.mode));
    read(r, "mode", mode);
    c.retrieval.mode = retrieval::parse_retrieval_mode(mode);
    read(r, "k", c.retrieval.k);
    read(r, "alpha", c.retrieval.alpha);
    read(r, "k_pre", c.retrieval.k_pre);
  }
  read(j, "profile", c.profile);
  read(j, "blueprint", c.blueprint);
  read(j, "backend", c.backend);
  read(j, "bank", c.bank);
  read(j, "out", c.out);
  read(j, "exams", c.exams);
  read(j, "reference", c.reference);
  read(j, "exam_count", c.exam_count);
  read(j, "mock_knows_items", c.mock_knows_items);
  read(j, "step_threshold", c.step_threshold);
  read(j, "students", c.students);
  read(j, "eta", c.eta);
  read(j, "items_per_unit", c.items_per_unit);
  read(j, "mastery_low", c.mastery_low);
  read(j, "mastery_high", c.mastery_high);
  read(j, "updates", c.updates);
  read(j, "step_size", c.step_size);
  read(j, "td_alpha", c.td_alpha);
  read(j, "normalize", c.normalize);
  c.check();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Config, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace mathprep::harness
