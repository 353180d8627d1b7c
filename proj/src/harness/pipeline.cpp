#include "mathprep/harness/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "mathprep/agents/generator.hpp"
#include "mathprep/agents/http_backend.hpp"
#include "mathprep/agents/ingest.hpp"
#include "mathprep/agents/mock_backend.hpp"
#include "mathprep/agents/solver.hpp"
#include "mathprep/agents/tutor.hpp"
#include "mathprep/exam/blueprint.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/exam/serialize.hpp"
#include "mathprep/harness/ablation.hpp"
#include "mathprep/harness/inputs.hpp"
#include "mathprep/harness/metrics.hpp"
#include "mathprep/harness/report.hpp"
#include "mathprep/memory/case_store.hpp"
#include "mathprep/memory/session_log.hpp"
#include "mathprep/mmdp/learning.hpp"
#include "mathprep/mmdp/toy.hpp"
#include "mathprep/retrieval/training.hpp"

namespace mathprep::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Config:
      return kExitUsage;
    case ErrorCode::Format:
    case ErrorCode::Schema:
    case ErrorCode::Version:
    case ErrorCode::Unsupported:
      return kExitSchema;
    case ErrorCode::Backend:
      return kExitBackend;
    default:
      return kExitOther;
  }
}

void write_outputs(const CommandResult& result, const std::string& out_dir) {
  const fs::path root(out_dir);
  write_file(root / "report.json", result.report.dump(2) + "\n");
  write_file(root / "report.txt", result.table);
  for (const auto& [name, content] : result.artifacts) write_file(root / name, content);
}

std::unique_ptr<agents::ChatBackend> make_backend(const RunConfig& config) {
  if (config.backend == "mock") return std::make_unique<agents::MockBackend>();
  if (config.backend == "http") {
    return std::make_unique<agents::HttpBackend>(agents::HttpBackendConfig::from_environment());
  }
  fail(ErrorCode::Config, "unknown backend '" + config.backend + "'");
}

mmdp::CbrMemory open_memory(const RunConfig& config, const retrieval::Embedder& embedder) {
  if (config.bank.empty()) return mmdp::CbrMemory(embedder);
  const fs::path dir(config.bank);
  auto bank = memory::load_bank(dir / "bank.jsonl").bank;
  retrieval::QEstimator estimator(embedder.dimension());
  if (fs::exists(dir / "estimator.json")) {
    std::istringstream in(read_file(dir / "estimator.json"));
    estimator = retrieval::load_checkpoint(in);
  }
  estimator.check_references(bank);
  return mmdp::CbrMemory(std::move(bank), std::move(estimator), embedder);
}

exam::Exam load_exam_any(const std::string& path) {
  const auto text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return exam::parse_exam(text);
  exam::Exam e;
  e.exam_id = fs::path(path).stem().string();
  e.provenance = exam::Provenance::Ingested;
  e.items = agents::normalize_input(text);
  exam::check_exam(e);
  return e;
}

std::vector<exam::Exam> load_exams(std::span<const std::string> paths) {
  std::vector<exam::Exam> out;
  for (const auto& p : paths) out.push_back(load_exam_any(p));
  return out;
}

namespace {

ordered_json base_report(const char* command, const RunConfig& config) {
  ordered_json j;
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

std::string bank_text(const mmdp::CbrMemory& memory) {
  std::ostringstream out;
  memory::save_bank(memory.bank(), out);
  return out.str();
}

std::string estimator_text(const mmdp::CbrMemory& memory) {
  std::ostringstream out;
  retrieval::save_checkpoint(memory.estimator(), out);
  return out.str();
}

std::string log_text(const memory::SessionLog& log) {
  std::ostringstream out;
  memory::save_log(log, out);
  return out.str();
}

void add_memory_artifacts(CommandResult& r, const mmdp::CbrMemory& memory) {
  r.artifacts.emplace_back("bank/bank.jsonl", bank_text(memory));
  r.artifacts.emplace_back("bank/estimator.json", estimator_text(memory));
}

ordered_json compliance_json(const exam::ComplianceReport& c) {
  ordered_json violations = ordered_json::array();
  for (const auto& v : c.violations) {
    violations.push_back({{"cell", exam::describe(v.cell)}, {"required", v.required}, {"found", v.found}});
  }
  return {{"compliant", c.compliant}, {"rate", c.rate}, {"violations", std::move(violations)}};
}

std::vector<exam::ExamItem> reference_items(const RunConfig& config) {
  std::vector<exam::ExamItem> items;
  for (const auto& e : load_exams(config.reference)) {
    items.insert(items.end(), e.items.begin(), e.items.end());
  }
  return items;
}

std::string padded(int n) {
  return (n < 10 ? "0" : "") + std::to_string(n);
}

struct Generated {
  std::vector<exam::Exam> exams;
  std::vector<exam::ComplianceReport> compliance;
  std::vector<double> novelty;
  ordered_json summary = ordered_json::array();
};

Generated generate(const RunConfig& config, const exam::SpecificationMatrix& matrix,
                   mmdp::CbrMemory& memory, agents::ChatBackend& backend, memory::SessionLog& log,
                   const std::string& prefix) {
  Generated g;
  const auto reference = reference_items(config);
  for (int i = 0; i < config.exam_count; ++i) {
    agents::GenerationConfig gc;
    gc.retrieval = config.retrieval;
    gc.seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(i);
    gc.exam_id = prefix + "-" + std::to_string(config.seed) + "-" + padded(i + 1);
    auto out = agents::generate_validated_exam(matrix, memory, backend, gc, log, reference);
    ordered_json items = ordered_json::array();
    for (const auto& it : out.result.items) {
      g.novelty.push_back(it.novelty);
      items.push_back({{"id", it.item_id},
                       {"novelty", it.novelty},
                       {"attempts", it.attempts},
                       {"exemplar", it.exemplar_case_id}});
    }
    g.summary.push_back({{"exam_id", gc.exam_id},
                         {"regenerations", out.run.regenerations},
                         {"compliance", compliance_json(out.result.compliance)},
                         {"items", std::move(items)}});
    g.compliance.push_back(out.result.compliance);
    g.exams.push_back(std::move(out.result.exam));
  }
  return g;
}

std::string answer_of(const exam::Response& r) {
  return std::holds_alternative<exam::Unanswered>(r) ? std::string() : exam::describe(r);
}

ordered_json responses_json(const exam::Exam& e, const agents::SolveResult& solved) {
  ordered_json items = ordered_json::array();
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    const auto& s = solved.items[i];
    const auto answer = answer_of(s.response);
    items.push_back({{"id", exam::render(e.items[i].id)},
                     {"answer", answer.empty() ? ordered_json(nullptr) : ordered_json(answer)},
                     {"flagged", s.flagged},
                     {"steps", s.steps}});
  }
  return {{"exam_id", e.exam_id}, {"items", std::move(items)}};
}

ordered_json graded_json(const GradedExam& g) {
  ordered_json items = ordered_json::array();
  int correct = 0;
  for (std::size_t i = 0; i < g.exam.items.size(); ++i) {
    const auto& s = g.score.items[i];
    correct += s.fully_correct ? 1 : 0;
    items.push_back({{"id", exam::render(g.exam.items[i].id)},
                     {"points", s.points},
                     {"max_points", s.max_points},
                     {"correct", s.fully_correct},
                     {"answered", s.answered}});
  }
  ordered_json j;
  j["exam_id"] = g.exam.exam_id;
  j["items"] = static_cast<int>(g.exam.items.size());
  j["correct"] = correct;
  j["points"] = g.score.total;
  j["max_points"] = g.score.max_total;
  j["score"] = g.score.normalized();
  j["latency_s"] = g.latency_seconds ? ordered_json(*g.latency_seconds) : ordered_json(nullptr);
  j["item_scores"] = std::move(items);
  return j;
}

void teach(agents::ChatBackend& backend, const RunConfig& config, std::span<const exam::Exam> exams) {
  auto* mock = dynamic_cast<agents::MockBackend*>(&backend);
  if (!mock || !config.mock_knows_items) return;
  for (const auto& e : exams) mock->learn(e);
}

struct Solved {
  std::vector<GradedExam> graded;
  ordered_json responses = ordered_json::array();
};

Solved solve_all(const RunConfig& config, std::span<const exam::Exam> exams, mmdp::CbrMemory& memory,
                 agents::ChatBackend& backend, memory::SessionLog& log) {
  Solved out;
  for (const auto& e : exams) {
    agents::SolveConfig sc;
    sc.retrieval = config.retrieval;
    sc.seed = config.seed;
    const auto start = std::chrono::steady_clock::now();
    auto solved = agents::solve_exam(e, memory, backend, sc, &log);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    GradedExam g{e, exam::score_exam(e, agents::responses_of(solved)), {}, took.count()};
    for (const auto& s : solved.items) g.steps.push_back(s.steps);
    out.responses.push_back(responses_json(e, solved));
    out.graded.push_back(std::move(g));
  }
  return out;
}

CommandResult finish(ordered_json report, const RunConfig& config, std::string table) {
  CommandResult r;
  r.report = seal_report(std::move(report), config.normalize);
  r.table = std::move(table) + "report_hash " + r.report["report_hash"].get<std::string>() + "\n";
  return r;
}

}  // namespace

CommandResult run_gen(const RunConfig& config, agents::ChatBackend& backend) {
  config.check();
  const auto bp = load_blueprint(config.blueprint);
  retrieval::HashingEmbedder embedder;
  auto memory = open_memory(config, embedder);
  memory::SessionLog log;
  auto g = generate(config, bp.matrix, memory, backend, log, "gen");
  MetricsInput input;
  input.compliance = g.compliance;
  input.novelty = g.novelty;
  const auto metrics = compute_metrics(input, {config.step_threshold});
  auto report = base_report("gen", config);
  report["generation"] = g.summary;
  report["metrics"] = to_json(metrics);
  auto r = finish(std::move(report), config, render_table(metrics));
  for (const auto& e : g.exams) r.artifacts.emplace_back("exams/" + e.exam_id + ".json", exam::serialize_exam(e));
  r.artifacts.emplace_back("session_log.jsonl", log_text(log));
  add_memory_artifacts(r, memory);
  return r;
}

CommandResult run_validate(const RunConfig& config) {
  config.check();
  if (config.exams.empty()) fail(ErrorCode::Config, "validate needs at least one exam");
  const auto bp = load_blueprint(config.blueprint);
  auto report = base_report("validate", config);
  ordered_json results = ordered_json::array();
  std::ostringstream table;
  bool all = true;
  MetricsInput input;
  for (std::size_t i = 0; i < config.exams.size(); ++i) {
    const auto e = load_exam_any(config.exams[i]);
    const auto c = exam::validate_exam(e, bp.matrix);
    all = all && c.compliant;
    input.compliance.push_back(c);
    auto j = compliance_json(c);
    j["exam_id"] = e.exam_id;
    j["path"] = config.exams[i];
    results.push_back(std::move(j));
    table << e.exam_id << ": " << (c.compliant ? "compliant" : "NOT compliant") << " (rate "
          << c.rate << ")\n";
    for (const auto& v : c.violations) {
      table << "  violation " << exam::describe(v.cell) << " required " << v.required << " found "
            << v.found << '\n';
    }
  }
  const auto metrics = compute_metrics(input, {config.step_threshold});
  report["results"] = std::move(results);
  report["metrics"] = to_json(metrics);
  auto r = finish(std::move(report), config, table.str());
  r.status = all ? kExitOk : kExitCheck;
  return r;
}

CommandResult run_grade(const RunConfig& config, const std::string& responses_path) {
  config.check();
  if (config.exams.size() != 1) fail(ErrorCode::Config, "grade needs exactly one exam");
  const auto e = load_exam_any(config.exams.front());
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(responses_path));
  } catch (const nlohmann::json::parse_error& err) {
    fail(ErrorCode::Schema, "responses file is not valid JSON: " + std::string(err.what()));
  }
  std::map<std::string, ordered_json> by_id;
  try {
    for (const auto& it : doc.at("items")) by_id[it.at("id").get<std::string>()] = it;
  } catch (const nlohmann::json::exception& err) {
    fail(ErrorCode::Schema, "responses file: " + std::string(err.what()));
  }
  std::vector<exam::Response> responses;
  GradedExam g{e, {}, {}, std::nullopt};
  for (const auto& item : e.items) {
    const auto id = exam::render(item.id);
    auto it = by_id.find(id);
    if (it == by_id.end() || it->second.value("answer", ordered_json(nullptr)).is_null()) {
      responses.emplace_back(exam::Unanswered{});
    } else {
      const auto answer = it->second.at("answer").get<std::string>();
      auto parsed = agents::parse_response(item, answer);
      if (!parsed) fail(ErrorCode::Schema, "responses.items[" + id + "].answer: cannot read '" + answer + "'");
      responses.push_back(*parsed);
    }
    g.steps.push_back(it == by_id.end() ? std::string() : it->second.value("steps", std::string()));
  }
  g.score = exam::score_exam(e, responses);
  MetricsInput input;
  input.graded.push_back(g);
  const auto metrics = compute_metrics(input, {config.step_threshold});
  auto report = base_report("grade", config);
  report["responses"] = responses_path;
  report["exams"] = ordered_json::array({graded_json(g)});
  report["metrics"] = to_json(metrics);
  return finish(std::move(report), config, render_table(metrics));
}

CommandResult run_solve(const RunConfig& config, agents::ChatBackend& backend) {
  config.check();
  if (config.exams.empty()) fail(ErrorCode::Config, "solve needs at least one exam");
  const auto exams = load_exams(config.exams);
  retrieval::HashingEmbedder embedder;
  auto memory = open_memory(config, embedder);
  memory::SessionLog log;
  teach(backend, config, exams);
  auto solved = solve_all(config, exams, memory, backend, log);
  MetricsInput input;
  input.graded = solved.graded;
  const auto metrics = compute_metrics(input, {config.step_threshold});
  auto report = base_report("solve", config);
  ordered_json graded = ordered_json::array();
  for (const auto& g : solved.graded) graded.push_back(graded_json(g));
  report["exams"] = std::move(graded);
  report["metrics"] = to_json(metrics);
  auto r = finish(std::move(report), config, render_table(metrics));
  for (const auto& resp : solved.responses) {
    r.artifacts.emplace_back("responses/" + resp["exam_id"].get<std::string>() + ".json", resp.dump(2) + "\n");
  }
  r.artifacts.emplace_back("session_log.jsonl", log_text(log));
  add_memory_artifacts(r, memory);
  return r;
}

CommandResult run_tutor_sim(const RunConfig& config) {
  config.check();
  const auto bp = load_blueprint(config.blueprint);
  retrieval::HashingEmbedder embedder;
  std::vector<exam::Exam> exams;
  if (config.exams.empty()) {
    agents::MockBackend mock;
    mmdp::CbrMemory scratch(embedder);
    memory::SessionLog log;
    exams = generate(config, bp.matrix, scratch, mock, log, "assess").exams;
  } else {
    exams = load_exams(config.exams);
  }
  const auto battery = merge_exams(exams, "assessment");
  const auto ontology = agents::SkillOntology::per_topic(bp.matrix);
  ontology.check_covers(bp.matrix);
  auto memory = open_memory(config, embedder);
  agents::CohortConfig cc;
  cc.students = config.students;
  cc.seed = config.seed;
  cc.eta = config.eta;
  cc.mastery_low = config.mastery_low;
  cc.mastery_high = config.mastery_high;
  cc.path.retrieval = config.retrieval;
  cc.path.items_per_unit = config.items_per_unit;
  const auto cohort = agents::run_tutoring_cohort(battery, ontology, memory, cc);

  MetricsInput input;
  input.tutoring = cohort.metrics;
  const auto metrics = compute_metrics(input, {config.step_threshold});
  auto report = base_report("tutor-sim", config);
  report["assessment_items"] = battery.items.size();
  ordered_json students = ordered_json::array();
  for (const auto& h : cohort.histories) {
    students.push_back({{"student_id", h.student_id},
                        {"pre", h.pre.score},
                        {"post", h.post ? ordered_json(h.post->score) : ordered_json(nullptr)},
                        {"units", h.plan.units.size()},
                        {"rationale", h.plan.rationale}});
  }
  report["students"] = std::move(students);
  report["repeated_before"] = cohort.metrics.repeated_before;
  report["repeated_after"] = cohort.metrics.repeated_after;
  report["flags"] = cohort.metrics.flags;
  report["metrics"] = to_json(metrics);
  auto r = finish(std::move(report), config, render_table(metrics));
  std::ostringstream histories;
  agents::write_histories(cohort.histories, histories);
  r.artifacts.emplace_back("histories.jsonl", histories.str());
  add_memory_artifacts(r, memory);
  return r;
}

CommandResult run_train_q(const RunConfig& config) {
  config.check();
  retrieval::HashingEmbedder embedder;
  retrieval::EstimatorConfig ec;
  ec.alpha = config.td_alpha;
  ec.gamma = 0.9;
  ec.step_size = config.step_size;
  mmdp::CbrMemory memory(embedder, ec);
  memory.estimator().set_params(retrieval::KernelParams::isotropic(embedder.dimension(), 1.0, 1.0));
  memory.estimator().sync_target();
  mmdp::ChainMdp chain(3);
  const auto experience = mmdp::seed_chain(chain, memory, ec.gamma);
  const auto start = memory.embed(chain.state(0).text);
  auto value = [&] {
    return retrieval::soft_value(start, experience.case_ids, memory.estimator(), memory.estimator().params());
  };
  const double before = value();
  mmdp::TdTrainingConfig tc;
  tc.updates = static_cast<std::size_t>(config.updates);
  tc.seed = config.seed;
  const auto trained = mmdp::train_td(memory.estimator(), experience.transitions, tc);
  const double after = value();
  const double oracle = mmdp::chain_soft_values(chain, ec.gamma, ec.alpha).front();
  const double error = std::abs(after - oracle);

  auto report = base_report("train-q", config);
  report["environment"] = "chain-3";
  report["updates"] = trained.updates;
  report["final_loss"] = trained.losses.empty() ? ordered_json(nullptr) : ordered_json(trained.losses.back());
  report["start_value_initial"] = before;
  report["start_value_trained"] = after;
  report["start_value_reference"] = oracle;
  report["abs_error"] = error;
  report["length_scale"] = memory.estimator().params().length_scale;
  std::ostringstream table;
  table << "updates " << trained.updates << "\nV(s0) initial " << before << "\nV(s0) trained " << after
        << "\nV(s0) reference " << oracle << "\nabs error " << error << '\n';
  auto r = finish(std::move(report), config, table.str());
  add_memory_artifacts(r, memory);
  r.status = error <= 0.05 ? kExitOk : kExitCheck;
  return r;
}

CommandResult run_eval(const RunConfig& config, agents::ChatBackend& backend) {
  config.check();
  const auto bp = load_blueprint(config.blueprint);
  retrieval::HashingEmbedder embedder;
  auto memory = open_memory(config, embedder);
  memory::SessionLog log;
  MetricsInput input;
  std::vector<exam::Exam> exams;
  ordered_json generation = ordered_json::array();
  if (config.exams.empty()) {
    auto g = generate(config, bp.matrix, memory, backend, log, "eval");
    exams = std::move(g.exams);
    input.novelty = std::move(g.novelty);
    generation = std::move(g.summary);
  } else {
    exams = load_exams(config.exams);
  }
  for (const auto& e : exams) input.compliance.push_back(exam::validate_exam(e, bp.matrix));
  teach(backend, config, exams);
  auto solved = solve_all(config, exams, memory, backend, log);
  input.graded = solved.graded;
  const auto metrics = compute_metrics(input, {config.step_threshold});

  auto report = base_report("eval", config);
  report["generation"] = std::move(generation);
  ordered_json compliance = ordered_json::array();
  for (std::size_t i = 0; i < exams.size(); ++i) {
    auto j = compliance_json(input.compliance[i]);
    j["exam_id"] = exams[i].exam_id;
    compliance.push_back(std::move(j));
  }
  report["compliance"] = std::move(compliance);
  ordered_json graded = ordered_json::array();
  for (const auto& g : solved.graded) graded.push_back(graded_json(g));
  report["exams"] = std::move(graded);
  report["bank_size"] = memory.bank().size();
  report["log_entries"] = log.size();
  report["metrics"] = to_json(metrics);
  auto r = finish(std::move(report), config, render_table(metrics));
  if (config.exams.empty()) {
    for (const auto& e : exams) r.artifacts.emplace_back("exams/" + e.exam_id + ".json", exam::serialize_exam(e));
  }
  for (const auto& resp : solved.responses) {
    r.artifacts.emplace_back("responses/" + resp["exam_id"].get<std::string>() + ".json", resp.dump(2) + "\n");
  }
  r.artifacts.emplace_back("session_log.jsonl", log_text(log));
  add_memory_artifacts(r, memory);
  return r;
}

CommandResult run_ablate(const RunConfig& config) {
  config.check();
  const auto bp = load_blueprint(config.blueprint);
  std::vector<exam::Exam> exams;
  if (config.exams.empty()) {
    retrieval::HashingEmbedder embedder;
    agents::MockBackend mock;
    mmdp::CbrMemory scratch(embedder);
    memory::SessionLog log;
    exams = generate(config, bp.matrix, scratch, mock, log, "ablate").exams;
  } else {
    exams = load_exams(config.exams);
  }
  WorkloadConfig wc;
  wc.k = config.retrieval.k;
  const auto workload = designed_workload(exams, wc);
  const auto variants = memory_variants(config.retrieval.k, config.retrieval.alpha, config.retrieval.k_pre);
  AblationConfig ac;
  ac.seed = config.seed;
  ac.step_threshold = config.step_threshold;
  const auto rows = run_ablation(workload, variants, ac);

  auto find = [&](const std::string& name) -> const AblationRow* {
    for (const auto& r : rows) {
      if (r.variant == name && !r.failed) return &r;
    }
    return nullptr;
  };
  const auto* none = find("none");
  const auto* np = find("readnp");
  const auto* p = find("readp");
  ordered_json checks;
  checks["none_never_retrieves"] = none && none->retrieval_calls == 0;
  checks["readnp_accuracy_ge_none"] = none && np && *np->accuracy >= *none->accuracy;
  checks["readp_accuracy_ge_readnp"] = np && p && *p->accuracy >= *np->accuracy;
  checks["readp_work_ge_readnp"] = np && p && p->retrieval_work >= np->retrieval_work;

  auto report = base_report("ablate", config);
  report["workload"] = {{"exams", exams.size()},
                        {"bank_size", workload.bank.size()},
                        {"known_items", workload.known.size()}};
  report["rows"] = to_json(rows);
  report["checks"] = checks;
  auto r = finish(std::move(report), config, render_ablation_table(rows));
  bool ok = true;
  for (const auto& [name, value] : checks.items()) ok = ok && value.get<bool>();
  r.status = ok ? kExitOk : kExitCheck;
  return r;
}

}  // namespace mathprep::harness
