#include "mathprep/agents/solver.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mathprep/error.hpp"
#include "mathprep/memory/case_store.hpp"
#include "mathprep/mmdp/rng.hpp"

namespace mathprep::agents {

namespace {

std::string format_weight(double w) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, w, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

std::string instructions(const exam::ExamItem& item) {
  switch (item.section()) {
    case exam::Section::I: return "Finish with 'ANSWER: <letter A-D>'.";
    case exam::Section::II: return "Finish with 'ANSWER: <four of T/F, comma separated>'.";
    case exam::Section::III: return "Finish with 'ANSWER: <number>'.";
  }
  return "";
}

void log_tool(memory::SessionLog* log, const std::string& parent, const std::string& id,
              const std::string& payload, const std::string& outcome) {
  if (!log || parent.empty()) return;
  log->append({memory::LogKind::Tool, id, parent, payload, outcome, log->tick()});
}

}  // namespace

std::optional<exam::Response> parse_response(const exam::ExamItem& item, std::string_view answer) {
  while (!answer.empty() && answer.back() == '.') answer.remove_suffix(1);
  if (answer == "UNKNOWN") return exam::Response{exam::Unanswered{}};
  switch (item.section()) {
    case exam::Section::I: {
      if (answer.size() == 1 && answer[0] >= 'A' && answer[0] <= 'D') {
        return exam::Response{exam::ChoiceResponse{answer[0] - 'A'}};
      }
      return std::nullopt;
    }
    case exam::Section::II: {
      exam::TruthResponse r;
      std::size_t k = 0;
      for (char c : answer) {
        if (c == ',' || c == ' ') continue;
        if ((c != 'T' && c != 'F') || k == 4) return std::nullopt;
        r.values[k++] = c == 'T';
      }
      if (k != 4) return std::nullopt;
      return exam::Response{r};
    }
    case exam::Section::III: {
      // Accept a decimal comma, as in "2,45".
      std::string text(answer);
      for (char& c : text) {
        if (c == ',') c = '.';
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
      return exam::Response{exam::NumericResponse{v}};
    }
  }
  return std::nullopt;
}

SolveResult solve_exam(const exam::Exam& exam, mmdp::CbrMemory& memory, ChatBackend& backend,
                       const SolveConfig& config, memory::SessionLog* log,
                       const std::string& parent_subtask) {
  exam::check_exam(exam);
  SolveResult out;
  for (const auto& item : exam.items) {
    const std::string id_text = exam::render(item.id);
    auto retrieved = mmdp::retrieve(mmdp::EnvState{item.stem, {}}, memory, config.retrieval);

    Prompt prompt;
    prompt.task = "solve";
    prompt.headers = {{"ITEM", id_text},
                      {"KIND", std::string(exam::body_kind(item.body))},
                      {"TOPIC", item.topic}};
    std::ostringstream body;
    body << "STEM: " << one_line(item.stem) << "\n";
    if (const auto* mcq = std::get_if<exam::MultipleChoice>(&item.body)) {
      for (int i = 0; i < 4; ++i) body << "CHOICE " << char('A' + i) << ": " << one_line(mcq->choices[i]) << "\n";
    } else if (const auto* tf = std::get_if<exam::TrueFalseGroup>(&item.body)) {
      for (int i = 0; i < 4; ++i) body << "STATEMENT " << char('a' + i) << ": " << one_line(tf->statements[i]) << "\n";
    } else {
      const auto& sa = std::get<exam::ShortAnswer>(item.body);
      body << "ROUND: " << sa.round_digits << "\n";
    }
    SolvedItem solved;
    for (std::size_t k = 0; k < retrieved.cases.size(); ++k) {
      const auto& c = memory.bank().at(retrieved.cases[k].index);
      solved.retrieved_ids.push_back(c.case_id);
      body << "CASE " << k + 1 << " WEIGHT: " << format_weight(retrieved.mu[k]) << "\n"
           << "CASE " << k + 1 << " STATE: " << one_line(c.state_text) << "\n"
           << "CASE " << k + 1 << " ACTION: " << one_line(c.action_text) << "\n"
           << "CASE " << k + 1 << " REWARD: " << (c.reward == 1.0 ? "1" : "0") << "\n";
    }
    body << "Solve step by step, one 'Step k:' line per step. " << instructions(item) << "\n";
    prompt.body = body.str();
    const std::string text = prompt.render();

    mmdp::Rng rng(config.seed ^ fnv1a(id_text));
    solved.raw = backend.complete("You solve national-exam mathematics items.", {{"user", text}},
                                  config.decode, rng.next());
    log_tool(log, parent_subtask, id_text, text, "prompt");
    log_tool(log, parent_subtask, id_text, solved.raw, "completion");

    std::optional<exam::Response> response;
    if (auto answer = extract_answer(solved.raw)) response = parse_response(item, *answer);
    solved.flagged = !response.has_value();
    solved.response = response.value_or(exam::Response{exam::Unanswered{}});
    for (const auto& step : extract_steps(solved.raw)) solved.steps += step + "\n";

    if (config.retain) {
      const auto score = exam::grade_item(item, solved.response);
      memory::Case c;
      c.case_id = config.case_prefix + "-" + std::to_string(memory.bank().next_seq());
      c.state_text = item.stem;
      c.action_text = exam::describe(solved.response);
      c.reward = score.fully_correct ? 1.0 : 0.0;
      c.success = score.fully_correct;
      c.annotations = {{"item_id", id_text}, {"exam_id", exam.exam_id}};
      const auto& kept = memory.retain(std::move(c));
      out.retained_case_ids.push_back(kept.case_id);
      log_tool(log, parent_subtask, kept.case_id, memory::case_to_line(kept), memory::kRetainOutcome);
      const auto s = memory.embed(item.stem);
      for (const auto& id : solved.retrieved_ids) {
        memory.estimator().add_record(id, retrieval::Record{s, kept.reward});
      }
      memory.estimator().add_record(kept.case_id, retrieval::Record{s, kept.reward});
    }
    out.items.push_back(std::move(solved));
  }
  return out;
}

std::vector<exam::Response> responses_of(const SolveResult& result) {
  std::vector<exam::Response> out;
  out.reserve(result.items.size());
  for (const auto& item : result.items) out.push_back(item.response);
  return out;
}

}  // namespace mathprep::agents
