#include "mathprep/agents/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "mathprep/error.hpp"
#include "mathprep/exam/serialize.hpp"
#include "mathprep/mmdp/rng.hpp"

namespace mathprep::agents {

namespace {

using exam::CognitiveLevel;
using exam::Section;

std::string str(long long v) { return std::to_string(v); }

std::string explanation_outline(const std::string& topic, CognitiveLevel level,
                                std::string_view format) {
  std::ostringstream out;
  out << "1. Content requirement: " << topic << "\n"
      << "2. Competency: mathematical problem solving\n"
      << "3. Criteria: choose a solution method\n"
      << "4. Indicator: carry out the chosen procedure\n"
      << "5. Cognitive level: " << exam::to_string(level) << "\n"
      << "6. Question format: " << format << "\n"
      << "7. Review orientation: revisit the core definitions of " << topic << "\n"
      << "8. Review topics: standard exercises on " << topic;
  return out.str();
}

exam::ExamItem template_item(const exam::QuestionId& id, const std::string& topic,
                             mmdp::Rng& rng) {
  exam::ExamItem item;
  item.id = id;
  item.topic = topic;
  item.level = id.level;
  const int phrasing = static_cast<int>(rng.index(3));
  switch (id.section) {
    case Section::I: {
      const long long a = 2 + static_cast<long long>(rng.index(8));
      const long long b = 1 + static_cast<long long>(rng.index(9));
      const long long c = 2 + static_cast<long long>(rng.index(5));
      const long long key = a * c * c + b;
      static const std::array<const char*, 3> lead = {
          "Consider the function", "Let", "A model used in this unit is"};
      item.stem = std::string(lead[phrasing]) + " $f(x) = " + str(a) + "x^2 + " + str(b) +
                  "$ (" + topic + "). Compute $f(" + str(c) + ")$.";
      std::array<long long, 4> values = {key, key + a, key - b, a * c + b};
      if (values[3] == key || values[3] == values[1] || values[3] == values[2]) values[3] = key + 2 * a + 1;
      std::array<int, 4> order = {0, 1, 2, 3};
      for (int i = 3; i > 0; --i) std::swap(order[i], order[rng.index(static_cast<std::size_t>(i) + 1)]);
      exam::MultipleChoice mcq;
      for (int i = 0; i < 4; ++i) {
        mcq.choices[i] = "$" + str(values[order[i]]) + "$";
        if (order[i] == 0) mcq.key = i;
      }
      item.body = mcq;
      item.solution = "Step 1: Substitute $x = " + str(c) + "$.\nStep 2: $" + str(a) + "\\cdot " +
                      str(c * c) + " + " + str(b) + " = " + str(key) + "$.";
      item.explanation = explanation_outline(topic, id.level, "multiple choice");
      break;
    }
    case Section::II: {
      exam::TrueFalseGroup tf;
      static const std::array<const char*, 3> lead = {
          "Decide whether each statement about", "Mark each claim on", "Judge the statements on"};
      std::string solution;
      for (int i = 0; i < 4; ++i) {
        const long long p = 2 + static_cast<long long>(rng.index(11));
        const long long q = 2 + static_cast<long long>(rng.index(11));
        const bool truth = rng.bernoulli(0.5);
        const long long shown = truth ? p * q : p * q + 1 + static_cast<long long>(rng.index(3));
        tf.statements[i] = "$" + str(p) + " \\times " + str(q) + " = " + str(shown) + "$";
        tf.key[i] = truth;
        solution += "Step " + str(i + 1) + ": $" + str(p) + " \\times " + str(q) + " = " +
                    str(p * q) + "$, so statement " + char('a' + i) + " is " +
                    (truth ? "true" : "false") + ".\n";
      }
      solution.pop_back();
      // The stem names the products so that distinct groups never share a stem.
      item.stem = std::string(lead[phrasing]) + " " + topic + " is true or false:";
      for (int i = 0; i < 4; ++i) item.stem += std::string(i ? "; " : " ") + char('a' + i) + ") " + tf.statements[i];
      item.body = tf;
      item.solution = solution;
      item.explanation = explanation_outline(topic, id.level, "true/false group");
      break;
    }
    case Section::III: {
      const long long a = 10 + static_cast<long long>(rng.index(90));
      const long long b = 2 + static_cast<long long>(rng.index(18));
      const long long c = 3 + static_cast<long long>(rng.index(9));
      static const std::array<const char*, 3> lead = {
          "A quantity starts at", "An account in a problem on", "Starting from"};
      if (phrasing == 1) {
        item.stem = std::string(lead[1]) + " " + topic + " holds " + str(a) + " units and gains " +
                    str(b) + " units per period. How many units are held after " + str(c) +
                    " periods?";
      } else {
        item.stem = std::string(lead[phrasing]) + " " + str(a) + " and increasing by " + str(b) +
                    " per step (" + topic + "), what is its value after " + str(c) + " steps?";
      }
      item.body = exam::ShortAnswer{static_cast<double>(a + b * c), 2};
      item.solution = "Step 1: The increase is $" + str(b) + " \\cdot " + str(c) + " = " +
                      str(b * c) + "$.\nStep 2: The value is $" + str(a) + " + " + str(b * c) +
                      " = " + str(a + b * c) + "$.";
      item.explanation = explanation_outline(topic, id.level, "short answer");
      break;
    }
  }
  return item;
}

struct SolvePayload {
  std::string stem;
  struct CaseLine {
    std::string state;
    std::string action;
    double reward = 0.0;
  };
  std::vector<CaseLine> cases;
};

SolvePayload parse_solve_body(const std::string& body) {
  SolvePayload out;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("STEM: ", 0) == 0) {
      out.stem = line.substr(6);
      continue;
    }
    if (line.rfind("CASE ", 0) != 0) continue;
    auto space = line.find(' ', 5);
    if (space == std::string::npos) continue;
    std::size_t k = std::stoul(line.substr(5, space - 5));
    if (k == 0) continue;
    if (out.cases.size() < k) out.cases.resize(k);
    auto rest = line.substr(space + 1);
    auto& c = out.cases[k - 1];
    if (rest.rfind("STATE: ", 0) == 0) c.state = rest.substr(7);
    if (rest.rfind("ACTION: ", 0) == 0) c.action = rest.substr(8);
    if (rest.rfind("REWARD: ", 0) == 0) c.reward = std::stod(rest.substr(8));
  }
  return out;
}

}  // namespace

std::string answer_text(const exam::ExamItem& item) {
  return exam::describe(exam::key_response(item));
}

void MockBackend::learn(const exam::Exam& exam) {
  for (const auto& item : exam.items) learn(item);
}

void MockBackend::learn(const exam::ExamItem& item) {
  knowledge_[one_line(item.stem)] = answer_text(item);
}

std::string MockBackend::complete(const std::string&, const std::vector<ChatMessage>& messages,
                                  const DecodeParams&, std::uint64_t seed) {
  ++calls_;
  if (messages.empty()) fail(ErrorCode::Backend, "mock backend received no messages");
  auto prompt = parse_prompt(messages.back().content);
  if (!prompt) return "I am not sure what is being asked.";
  if (prompt->task == "generate") return generate(*prompt, seed);
  if (prompt->task == "solve") return solve(*prompt, seed);
  return "Unsupported task.";
}

std::string MockBackend::generate(const Prompt& prompt, std::uint64_t seed) {
  if (failing_generations_ > 0) {
    --failing_generations_;
    return "Here is a question you might like, but I forgot the format.";
  }
  auto id_text = prompt.header("ID");
  auto topic = prompt.header("TOPIC");
  if (!id_text || !topic) return "Missing ID or TOPIC.";
  const auto id = exam::parse_question_id(*id_text);
  const std::uint64_t salt = fnv1a(*id_text + "|" + prompt.header("ATTEMPT").value_or("0") + "|" +
                                   prompt.header("EXEMPLAR").value_or(""));
  mmdp::Rng rng(seed ^ salt);
  auto item = template_item(id, *topic, rng);
  return "Drafted one item for the requested cell.\nANSWER: " + exam::item_to_json(item).dump();
}

std::string MockBackend::solve(const Prompt& prompt, std::uint64_t seed) const {
  const auto item_id = prompt.header("ITEM").value_or("");
  if (garbled_.count(item_id)) return "The answer is somewhere between the options.";
  const auto payload = parse_solve_body(prompt.body);
  const bool variant = (fnv1a(prompt.body, seed) & 1U) != 0;
  if (!withheld_.count(item_id)) {
    auto it = knowledge_.find(payload.stem);
    if (it != knowledge_.end()) {
      return std::string(variant ? "Step 1: Restate the problem.\n" : "Step 1: Identify the given data.\n") +
             "Step 2: Apply the relevant rule.\nStep 3: Check the result.\nANSWER: " + it->second;
    }
  }
  for (const auto& c : payload.cases) {
    if (c.reward == 1.0 && c.state == payload.stem && !c.action.empty()) {
      return "Step 1: A retrieved case solves the same problem.\nStep 2: Reuse its verified "
             "answer.\nANSWER: " +
             c.action;
    }
  }
  return "I cannot determine the answer.\nANSWER: UNKNOWN";
}

}  // namespace mathprep::agents
