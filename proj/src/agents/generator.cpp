#include "mathprep/agents/generator.hpp"

#include <algorithm>

#include "mathprep/error.hpp"
#include "mathprep/exam/novelty.hpp"
#include "mathprep/exam/serialize.hpp"
#include "mathprep/memory/case_store.hpp"

namespace mathprep::agents {

namespace {

using exam::Section;

const char* format_name(Section s) {
  switch (s) {
    case Section::I: return "multiple choice with four options A-D";
    case Section::II: return "four true/false statements a-d";
    case Section::III: return "short numeric answer";
  }
  return "?";
}

struct Slot {
  exam::CellKey cell;
  exam::QuestionId id;
};

std::vector<Slot> slots_of(const exam::SpecificationMatrix& matrix) {
  std::vector<Slot> slots;
  for (const auto& [cell, count] : matrix.cells()) {
    if (count <= 0) continue;
    const int code = matrix.topic_code(cell.topic);
    for (int k = 1; k <= count; ++k) {
      slots.push_back({cell, exam::make_question_id(code, cell.section, cell.level, count > 1 ? k : 0)});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.id.section != b.id.section) return a.id.section < b.id.section;
    return a.id < b.id;
  });
  return slots;
}

void log_tool(memory::SessionLog* log, const std::string& parent, const std::string& id,
              const std::string& payload, const std::string& outcome) {
  if (!log || parent.empty()) return;
  log->append({memory::LogKind::Tool, id, parent, payload, outcome, log->tick()});
}

}  // namespace

std::string generation_state(const exam::CellKey& cell, int topic_code) {
  return "generate a section " + std::string(exam::to_string(cell.section)) + " item on topic " +
         std::to_string(topic_code) + " (" + cell.topic + ") at the " +
         std::string(exam::to_string(cell.level)) + " level";
}

GenerationResult generate_exam(const exam::SpecificationMatrix& matrix, mmdp::CbrMemory& memory,
                               ChatBackend& backend, const GenerationConfig& config,
                               std::span<const exam::ExamItem> reference,
                               memory::SessionLog* log, const std::string& parent_subtask) {
  if (config.retry_limit < 0) fail(ErrorCode::Config, "retry limit must be >= 0");
  GenerationResult out;
  out.exam.exam_id = config.exam_id;
  out.exam.provenance = exam::Provenance::Generated;

  std::vector<std::string> reference_stems;
  for (const auto& item : reference) reference_stems.push_back(item.stem);
  for (const auto& c : memory.bank().cases()) {
    if (c.annotations.count("item_id")) reference_stems.push_back(c.action_text);
  }

  struct Pending {
    std::string state;
    std::vector<std::string> retrieved;
  };
  std::vector<Pending> pending;

  for (const auto& slot : slots_of(matrix)) {
    const std::string id_text = exam::render(slot.id);
    const std::string state = generation_state(slot.cell, slot.id.topic_code);
    mmdp::Rng rng(config.seed ^ fnv1a(id_text + "#" + std::to_string(config.attempt)));
    auto retrieved = mmdp::retrieve(mmdp::EnvState{state, {}}, memory, config.retrieval);

    // Eq. (1): draw the conditioning case from mu, then let the backend act.
    const memory::Case* exemplar = nullptr;
    if (!retrieved.cases.empty()) {
      exemplar = &memory.bank().at(retrieved.cases[mmdp::sample_index(retrieved.mu, rng)].index);
    }

    std::vector<std::string> raw;
    std::optional<exam::ExamItem> item;
    int attempts = 0;
    for (int attempt = 0; attempt <= config.retry_limit && !item; ++attempt) {
      ++attempts;
      Prompt prompt;
      prompt.task = "generate";
      prompt.headers = {{"ID", id_text},
                        {"TOPIC", slot.cell.topic},
                        {"TOPIC_CODE", std::to_string(slot.id.topic_code)},
                        {"SECTION", std::string(exam::to_string(slot.id.section))},
                        {"LEVEL", std::string(exam::to_string(slot.id.level))},
                        {"FORMAT", format_name(slot.id.section)},
                        {"ATTEMPT", std::to_string(config.attempt) + "." + std::to_string(attempt)}};
      if (exemplar) prompt.headers.emplace_back("EXEMPLAR", exemplar->case_id);
      prompt.body =
          "Write one new exam item for the cell above. Return the item as a single-line JSON "
          "object in the exam interchange format on a final line starting with ANSWER:.\n";
      if (exemplar) prompt.body += "Exemplar (do not copy): " + one_line(exemplar->action_text) + "\n";
      const std::string text = prompt.render();
      const std::string completion =
          backend.complete("You write national-exam mathematics items.", {{"user", text}},
                           config.decode, rng.next());
      raw.push_back(completion);
      log_tool(log, parent_subtask, id_text + "#" + std::to_string(attempt), text, "prompt");
      log_tool(log, parent_subtask, id_text + "#" + std::to_string(attempt), completion, "completion");
      auto answer = extract_answer(completion);
      if (!answer) continue;
      try {
        auto parsed = exam::item_from_json(nlohmann::ordered_json::parse(*answer), id_text);
        if (parsed.id != slot.id || parsed.topic != slot.cell.topic) continue;
        exam::check_item(parsed, id_text);
        item = std::move(parsed);
      } catch (const nlohmann::json::exception&) {
      } catch (const Error&) {
      }
    }
    if (!item) {
      throw Error(ErrorCode::Generation,
                  "backend output for " + id_text + " stayed unparseable after " +
                      std::to_string(attempts) + " attempts",
                  raw);
    }
    GeneratedItemReport report;
    report.item_id = id_text;
    report.novelty = exam::novelty_overlap(item->stem, reference_stems, config.novelty_n);
    report.attempts = attempts;
    if (exemplar) report.exemplar_case_id = exemplar->case_id;
    out.items.push_back(report);
    out.exam.items.push_back(std::move(*item));

    Pending p{state, {}};
    for (const auto& r : retrieved.cases) p.retrieved.push_back(memory.bank().at(r.index).case_id);
    pending.push_back(std::move(p));
  }

  exam::check_exam(out.exam);
  out.compliance = exam::validate_exam(out.exam, matrix);

  // Retain: binary reward for compliance and novelty, recorded for the new
  // case and for every case that conditioned it.
  for (std::size_t i = 0; i < out.exam.items.size(); ++i) {
    const auto& item = out.exam.items[i];
    const bool success =
        out.compliance.compliant && out.items[i].novelty <= config.novelty_threshold;
    memory::Case c;
    c.case_id = config.exam_id + "/" + out.items[i].item_id + "/a" + std::to_string(config.attempt);
    c.state_text = pending[i].state;
    c.action_text = item.stem;
    c.reward = success ? 1.0 : 0.0;
    c.success = success;
    c.annotations = {{"item_id", out.items[i].item_id},
                     {"item_json", exam::item_to_json(item).dump()}};
    const auto& kept = memory.retain(std::move(c));
    out.retained_case_ids.push_back(kept.case_id);
    log_tool(log, parent_subtask, kept.case_id, memory::case_to_line(kept), memory::kRetainOutcome);
    const auto s = memory.embed(pending[i].state);
    for (const auto& id : pending[i].retrieved) {
      memory.estimator().add_record(id, retrieval::Record{s, kept.reward});
    }
    memory.estimator().add_record(kept.case_id, retrieval::Record{s, kept.reward});
  }
  return out;
}

OrchestratedGeneration generate_validated_exam(const exam::SpecificationMatrix& matrix,
                                               mmdp::CbrMemory& memory, ChatBackend& backend,
                                               const GenerationConfig& config,
                                               memory::SessionLog& log,
                                               std::span<const exam::ExamItem> reference,
                                               int inject_validate_failures) {
  OrchestratedGeneration out;
  Orchestrator orchestrator(log, config.retry_limit);
  int attempt = config.attempt;
  int forced = inject_validate_failures;
  auto produce = [&](const Subtask& task) {
    GenerationConfig cfg = config;
    cfg.attempt = attempt++;
    out.result = generate_exam(matrix, memory, backend, cfg, reference, &log, task.id);
    return true;
  };
  orchestrator.on("generate", produce);
  orchestrator.on("regenerate", produce);
  orchestrator.on("validate", [&](const Subtask&) {
    if (forced > 0) {
      --forced;
      return false;
    }
    return out.result.compliance.compliant;
  });
  out.run = orchestrator.run({RequestKind::GenerateExam, config.exam_id, config.exam_id});
  if (!out.run.succeeded) {
    fail(ErrorCode::Generation, "no compliant exam after " +
                                    std::to_string(out.run.regenerations) + " regenerations");
  }
  return out;
}

}  // namespace mathprep::agents
