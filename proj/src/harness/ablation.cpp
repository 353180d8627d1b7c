#include "mathprep/harness/ablation.hpp"

#include <charconv>
#include <chrono>
#include <sstream>

#include "mathprep/agents/mock_backend.hpp"
#include "mathprep/agents/solver.hpp"
#include "mathprep/error.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/harness/metrics.hpp"
#include "mathprep/mmdp/policy.hpp"
#include "mathprep/retrieval/embedding.hpp"

namespace mathprep::harness {

std::vector<AblationVariant> memory_variants(std::size_t k, double alpha, std::size_t k_pre) {
  using retrieval::RetrievalMode;
  return {{"none", {RetrievalMode::None, k, alpha, k_pre}},
          {"readnp", {RetrievalMode::ReadNP, k, alpha, k_pre}},
          {"readp", {RetrievalMode::ReadP, k, alpha, k_pre}}};
}

namespace {

exam::Response wrong_response(const exam::ExamItem& item) {
  if (const auto* m = std::get_if<exam::MultipleChoice>(&item.body)) {
    return exam::ChoiceResponse{(m->key + 1) % 4};
  }
  if (const auto* t = std::get_if<exam::TrueFalseGroup>(&item.body)) {
    exam::TruthResponse r{t->key};
    r.values[0] = !r.values[0];
    return r;
  }
  return exam::NumericResponse{std::get<exam::ShortAnswer>(item.body).key + 1.0};
}

}  // namespace

AblationWorkload designed_workload(std::span<const exam::Exam> exams, const WorkloadConfig& config) {
  if (config.k == 0) fail(ErrorCode::Config, "workload needs k >= 1");
  retrieval::HashingEmbedder embedder(config.dimension);
  AblationWorkload w{
      {exams.begin(), exams.end()},
      {},
      retrieval::QEstimator(retrieval::KernelParams::isotropic(config.dimension, 1.0, config.length_scale),
                            retrieval::EstimatorConfig{}),
      {}};
  std::vector<const exam::ExamItem*> unknown;
  for (const auto& e : exams) {
    for (const auto& item : e.items) {
      if (item.level == exam::CognitiveLevel::Recognition) {
        w.known.push_back(item);
      } else {
        unknown.push_back(&item);
      }
    }
  }
  std::vector<retrieval::Embedding> stems;
  for (const auto* item : unknown) stems.push_back(embedder.embed(item->stem));

  std::size_t next = 0;
  auto retain = [&](const exam::ExamItem& item, const exam::Response& response, double reward) {
    memory::Case c;
    c.case_id = "oracle-" + std::to_string(++next);
    c.state_text = item.stem;
    c.action_text = exam::describe(response);
    c.reward = reward;
    c.success = reward > 0.0;
    c.annotations = {{"item_id", exam::render(item.id)}};
    return w.bank.retain(std::move(c)).case_id;
  };
  for (std::size_t u = 0; u < unknown.size(); ++u) {
    const auto& item = *unknown[u];
    const bool buried = u % 2 == 1;
    std::vector<std::string> failures;
    std::string success;
    if (!buried) success = retain(item, exam::key_response(item), 1.0);
    for (std::size_t f = 0; f < config.k; ++f) failures.push_back(retain(item, wrong_response(item), 0.0));
    if (buried) success = retain(item, exam::key_response(item), 1.0);

    for (const auto& id : failures) w.estimator.add_record(id, {stems[u], 0.0});
    w.estimator.add_record(success, {stems[u], 1.0});
    for (std::size_t other = 0; other < unknown.size(); ++other) {
      if (unknown[other]->stem == item.stem) continue;
      w.estimator.add_record(success, {stems[other], 0.0});
    }
  }
  return w;
}

std::unique_ptr<agents::ChatBackend> mock_factory(const AblationWorkload& workload) {
  auto mock = std::make_unique<agents::MockBackend>();
  for (const auto& item : workload.known) mock->learn(item);
  return mock;
}

std::vector<AblationRow> run_ablation(const AblationWorkload& workload,
                                      std::span<const AblationVariant> variants,
                                      const AblationConfig& config) {
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    AblationRow row;
    row.variant = v.name;
    row.retrieval = v.retrieval;
    try {
      retrieval::HashingEmbedder embedder(workload.estimator.dimension());
      mmdp::CbrMemory memory(workload.bank, workload.estimator, embedder);
      auto backend = config.backend(workload);
      agents::SolveConfig solve;
      solve.retrieval = v.retrieval;
      solve.seed = config.seed;
      solve.case_prefix = "ablate";
      // Every variant reads the same seeded bank; nothing learned mid-run
      // leaks into later exams.
      solve.retain = false;
      MetricsInput input;
      for (const auto& e : workload.exams) {
        const auto start = std::chrono::steady_clock::now();
        auto solved = agents::solve_exam(e, memory, *backend, solve);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        GradedExam g{e, exam::score_exam(e, agents::responses_of(solved)), {}, took.count()};
        for (const auto& s : solved.items) g.steps.push_back(s.steps);
        row.items += static_cast<int>(e.items.size());
        input.graded.push_back(std::move(g));
      }
      const auto m = compute_metrics(input, {config.step_threshold});
      row.accuracy = m.item_accuracy.value;
      row.hard_accuracy = m.hard_item_accuracy.value;
      row.step_proxy = m.step_completeness.value;
      row.latency_mean_s = m.latency_mean.value;
      row.latency_p95_s = m.latency_p95.value;
      row.retrieval_calls = memory.retrieval_calls();
      row.retrieval_work = memory.retrieval_work();
    } catch (const std::exception& e) {
      row = AblationRow{};
      row.variant = v.name;
      row.retrieval = v.retrieval;
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string fmt(const std::optional<double>& v, int digits) {
  if (!v) return "-";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, *v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace

nlohmann::ordered_json to_json(std::span<const AblationRow> rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["variant"] = r.variant;
    j["mode"] = retrieval::to_string(r.retrieval.mode);
    j["k"] = r.retrieval.k;
    j["alpha"] = r.retrieval.alpha;
    j["failed"] = r.failed;
    j["error"] = r.error;
    j["items"] = r.items;
    j["accuracy"] = opt(r.accuracy);
    j["hard_accuracy"] = opt(r.hard_accuracy);
    j["step_proxy"] = opt(r.step_proxy);
    j["latency_mean_s"] = opt(r.latency_mean_s);
    j["latency_p95_s"] = opt(r.latency_p95_s);
    j["retrieval_calls"] = r.retrieval_calls;
    j["retrieval_work"] = r.retrieval_work;
    out.push_back(std::move(j));
  }
  return out;
}

std::string render_ablation_table(std::span<const AblationRow> rows) {
  std::ostringstream out;
  auto cell = [&](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    out << s << "  ";
  };
  cell("variant", 8);
  cell("accuracy", 9);
  cell("hard", 8);
  cell("steps", 8);
  cell("lat_mean", 9);
  cell("lat_p95", 9);
  cell("calls", 6);
  cell("work", 9);
  out << "status\n";
  for (const auto& r : rows) {
    cell(r.variant, 8);
    cell(fmt(r.accuracy, 2), 9);
    cell(fmt(r.hard_accuracy, 2), 8);
    cell(fmt(r.step_proxy, 2), 8);
    cell(fmt(r.latency_mean_s, 4), 9);
    cell(fmt(r.latency_p95_s, 4), 9);
    cell(std::to_string(r.retrieval_calls), 6);
    cell(std::to_string(r.retrieval_work), 9);
    out << (r.failed ? "failed: " + r.error : "ok") << '\n';
  }
  return out.str();
}

}  // namespace mathprep::harness
