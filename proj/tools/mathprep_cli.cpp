#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mathprep/error.hpp"
#include "mathprep/harness/pipeline.hpp"
#include "mathprep/harness/run_config.hpp"

namespace {

using namespace mathprep;
using harness::RunConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> k;
  std::optional<double> alpha;
  std::optional<std::string> backend;
  std::optional<std::string> bank;
  std::optional<std::string> out;
  std::optional<std::string> blueprint;
  std::optional<int> exam_count;
  std::optional<int> students;
  std::vector<std::string> reference;
  bool normalize = false;
};

RunConfig resolve(const Overrides& o, const std::vector<std::string>& exams) {
  RunConfig c = o.config.empty() ? RunConfig{} : harness::load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.mode) c.retrieval.mode = retrieval::parse_retrieval_mode(*o.mode);
  if (o.k) c.retrieval.k = *o.k;
  if (o.alpha) c.retrieval.alpha = *o.alpha;
  if (o.backend) c.backend = *o.backend;
  if (o.bank) c.bank = *o.bank;
  if (o.out) c.out = *o.out;
  if (o.blueprint) c.blueprint = *o.blueprint;
  if (o.exam_count) c.exam_count = *o.exam_count;
  if (o.students) c.students = *o.students;
  if (!o.reference.empty()) c.reference = o.reference;
  if (!exams.empty()) c.exams = exams;
  if (o.normalize) c.normalize = true;
  c.check();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mathprep: exam generation, solving and tutoring experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "RunConfig JSON file");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--mode", o.mode, "Retrieval mode")->check(CLI::IsMember({"none", "readnp", "readp"}));
  app.add_option("--k", o.k, "Retrieved cases per query");
  app.add_option("--alpha", o.alpha, "Retrieval softmax temperature");
  app.add_option("--backend", o.backend, "Language model backend")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--bank", o.bank, "Directory holding bank.jsonl and estimator.json");
  app.add_option("--out", o.out, "Output directory for the report and artifacts");
  app.add_option("--blueprint", o.blueprint, "Blueprint JSON (default: built-in 2025 matrix)");
  app.add_option("--exams", o.exam_count, "Exams to generate when none are given");
  app.add_option("--students", o.students, "Simulated students for tutor-sim");
  app.add_option("--reference", o.reference, "Exams used as the novelty reference");
  app.add_flag("--normalize", o.normalize, "Drop wall-clock fields from the report");

  std::vector<std::string> exams;
  std::string responses;
  auto* gen = app.add_subcommand("gen", "Generate exams from the blueprint");
  auto* validate = app.add_subcommand("validate", "Check exams against the blueprint");
  validate->add_option("exams", exams, "Exam files")->required();
  auto* grade = app.add_subcommand("grade", "Grade a responses file against an exam");
  grade->add_option("exam", exams, "Exam file")->required()->expected(1);
  grade->add_option("--responses", responses, "Responses JSON written by solve")->required();
  auto* solve = app.add_subcommand("solve", "Solve exams with the configured backend");
  solve->add_option("exams", exams, "Exam files (JSON or plain text)")->required();
  auto* tutor = app.add_subcommand("tutor-sim", "Simulate a tutoring cohort");
  tutor->add_option("exams", exams, "Assessment exams, merged into one");
  auto* train = app.add_subcommand("train-q", "Train the kernel Q estimator on the chain task");
  auto* eval = app.add_subcommand("eval", "Generate, validate, solve, grade and score");
  eval->add_option("exams", exams, "Exam files to use instead of generating");
  auto* ablate = app.add_subcommand("ablate", "Compare no memory, ReadNP and ReadP");
  ablate->add_option("exams", exams, "Workload exams (default: generated)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return harness::kExitUsage;
  }

  try {
    const auto config = resolve(o, exams);
    harness::CommandResult result;
    if (*gen) {
      auto backend = harness::make_backend(config);
      result = harness::run_gen(config, *backend);
    } else if (*validate) {
      result = harness::run_validate(config);
    } else if (*grade) {
      result = harness::run_grade(config, responses);
    } else if (*solve) {
      auto backend = harness::make_backend(config);
      result = harness::run_solve(config, *backend);
    } else if (*tutor) {
      result = harness::run_tutor_sim(config);
    } else if (*train) {
      result = harness::run_train_q(config);
    } else if (*eval) {
      auto backend = harness::make_backend(config);
      result = harness::run_eval(config, *backend);
    } else if (*ablate) {
      result = harness::run_ablate(config);
    }
    harness::write_outputs(result, config.out);
    std::cout << result.table << "report " << config.out << "/report.json\n";
    return result.status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::kExitOther;
  }
}
