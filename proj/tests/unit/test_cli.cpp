#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "fixtures.hpp"

#include "mathprep/harness/inputs.hpp"

namespace fs = std::filesystem;

namespace {

// Runs the CLI inside `dir` and returns its exit status.
int run_cli(const fixtures::ScratchDir& dir, const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + dir.path().string() + "' && " + env + " '" MATHPREP_CLI "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int raw = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

std::string exam_arg(const std::string& name) { return "'" + fixtures::exam_path(name).string() + "'"; }

nlohmann::json report_at(const fixtures::ScratchDir& dir, const std::string& out) {
  return nlohmann::json::parse(mathprep::harness::read_file(dir.path() / out / "report.json"));
}

}  // namespace

TEST_CASE("validate passes the compliant exam and flags the perturbed one") {
  fixtures::ScratchDir dir("cli-validate");
  CHECK(run_cli(dir, "--out ok validate " + exam_arg("compliant_2025")) == 0);
  CHECK(run_cli(dir, "--out bad validate " + exam_arg("perturbed_2025")) == 5);
  const auto stdout_text = mathprep::harness::read_file(dir.path() / "stdout.txt");
  CHECK(stdout_text.find("NOT compliant") != std::string::npos);
  CHECK(stdout_text.find("violation") != std::string::npos);
  CHECK(fs::exists(dir.path() / "bad" / "report.txt"));
  CHECK(report_at(dir, "bad").dump().find("Spatial angles and distances") != std::string::npos);
}

TEST_CASE("usage, schema and backend failures have distinct statuses") {
  fixtures::ScratchDir dir("cli-errors");
  CHECK(run_cli(dir, "bogus") == 2);
  CHECK(run_cli(dir, "--mode sideways validate " + exam_arg("compliant_2025")) == 2);
  mathprep::harness::write_file(dir.path() / "broken.json", "{not json");
  CHECK(run_cli(dir, "validate broken.json") == 3);
  CHECK(run_cli(dir, "--backend http solve " + exam_arg("appendix_a"),
                "MATHPREP_BACKEND_URL= MATHPREP_MODEL=") == 2);
  CHECK(run_cli(dir, "--backend http solve " + exam_arg("appendix_a"),
                "MATHPREP_BACKEND_URL=http://127.0.0.1:9 MATHPREP_MODEL=x") == 4);
}

TEST_CASE("generation is reproducible from the seed") {
  fixtures::ScratchDir dir("cli-gen");
  REQUIRE(run_cli(dir, "--seed 11 --out a gen") == 0);
  REQUIRE(run_cli(dir, "--seed 11 --out b gen") == 0);
  REQUIRE(run_cli(dir, "--seed 12 --out c gen") == 0);
  CHECK(report_at(dir, "a")["report_hash"] == report_at(dir, "b")["report_hash"]);
  CHECK(report_at(dir, "a")["report_hash"] != report_at(dir, "c")["report_hash"]);
}

TEST_CASE("the embedded config reruns the experiment byte for byte") {
  fixtures::ScratchDir dir("cli-rerun");
  REQUIRE(run_cli(dir, "--seed 5 --students 4 --out run --normalize tutor-sim") == 0);
  const auto first = mathprep::harness::read_file(dir.path() / "run" / "report.json");
  const auto config = nlohmann::ordered_json::parse(first)["config"];
  mathprep::harness::write_file(dir.path() / "config.json", config.dump(2));
  REQUIRE(run_cli(dir, "--config config.json tutor-sim") == 0);
  CHECK(mathprep::harness::read_file(dir.path() / "run" / "report.json") == first);
}
