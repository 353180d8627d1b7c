#include "mathprep/agents/tutor.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "mathprep/error.hpp"
#include "mathprep/mmdp/environment.hpp"

namespace mathprep::agents {

using exam::CognitiveLevel;
using exam::Section;

SkillOntology::SkillOntology(std::vector<Skill> skills, CellIndex cells)
    : skills_(std::move(skills)), cells_(std::move(cells)) {
  std::set<std::string> ids;
  for (const auto& s : skills_) {
    if (s.id.empty()) fail(ErrorCode::InvalidArgument, "skill id must be non-empty");
    if (!ids.insert(s.id).second) fail(ErrorCode::Conflict, "duplicate skill id '" + s.id + "'");
  }
  for (const auto& [cell, mapped] : cells_) {
    for (const auto& id : mapped) {
      if (!ids.count(id)) fail(ErrorCode::Reference, "cell maps to unknown skill '" + id + "'");
    }
  }
}

SkillOntology SkillOntology::per_topic(const exam::SpecificationMatrix& matrix) {
  std::vector<Skill> skills;
  CellIndex cells;
  for (const auto& topic : matrix.topics()) {
    Skill s{"S" + std::to_string(matrix.topic_code(topic)), topic, CognitiveLevel::Recognition};
    for (const auto& [cell, count] : matrix.cells()) {
      if (cell.topic == topic && count > 0) s.level = std::max(s.level, cell.level);
    }
    for (auto level : exam::kLevels) cells[{topic, level}].push_back(s.id);
    skills.push_back(std::move(s));
  }
  return SkillOntology(std::move(skills), std::move(cells));
}

const Skill* SkillOntology::find(const std::string& skill_id) const {
  for (const auto& s : skills_) {
    if (s.id == skill_id) return &s;
  }
  return nullptr;
}

std::optional<std::string> SkillOntology::skill_for(const std::string& topic,
                                                    CognitiveLevel level) const {
  auto it = cells_.find({topic, level});
  if (it == cells_.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

void SkillOntology::check_covers(const exam::SpecificationMatrix& matrix) const {
  for (const auto& [cell, count] : matrix.cells()) {
    if (count > 0 && !skill_for(cell.topic, cell.level)) {
      fail(ErrorCode::Reference, "no skill covers " + exam::describe(cell));
    }
  }
}

std::vector<SkillAttempt> skill_attempts(const exam::Exam& exam, const exam::ExamScore& score,
                                         const SkillOntology& ontology,
                                         std::vector<std::string>* unmapped) {
  if (score.items.size() != exam.items.size()) {
    fail(ErrorCode::Shape, "graded responses do not align with the exam items");
  }
  std::vector<SkillAttempt> out;
  for (std::size_t i = 0; i < exam.items.size(); ++i) {
    const auto& item = exam.items[i];
    const std::string id = exam::render(item.id);
    auto skill = ontology.skill_for(item.topic, item.level);
    if (!skill) {
      if (unmapped) unmapped->push_back(id);
      continue;
    }
    const auto& s = score.items[i];
    if (item.section() == Section::II) {
      for (int k = 0; k < 4; ++k) {
        out.push_back({id + "#" + char('a' + k), *skill, k < s.correct_parts});
      }
    } else {
      out.push_back({id, *skill, s.fully_correct});
    }
  }
  return out;
}

double GapReport::severity(const std::string& skill_id) const {
  for (const auto& s : stats) {
    if (s.skill_id == skill_id) return s.error_rate;
  }
  return 0.0;
}

GapReport analyze_errors(const exam::Exam& exam, const exam::ExamScore& score,
                         const SkillOntology& ontology, const GapConfig& config) {
  GapReport report;
  const auto attempts = skill_attempts(exam, score, ontology, &report.unmapped);
  std::map<std::string, SkillStat> by_skill;
  for (const auto& a : attempts) {
    auto& s = by_skill[a.skill_id];
    s.skill_id = a.skill_id;
    ++s.attempts;
    if (!a.correct) ++s.errors;
  }
  for (auto& [id, s] : by_skill) {
    s.error_rate = static_cast<double>(s.errors) / static_cast<double>(s.attempts);
    s.gap = s.attempts >= config.min_attempts && s.error_rate > config.threshold;
    report.stats.push_back(s);
    if (s.gap) report.gaps.push_back(id);
  }
  std::stable_sort(report.gaps.begin(), report.gaps.end(), [&](const auto& a, const auto& b) {
    return by_skill[a].error_rate > by_skill[b].error_rate;
  });
  return report;
}

std::string unit_text(const PracticeUnit& unit) {
  return "practice " + unit.skill_id + " x" + std::to_string(unit.item_count) + " at " +
         std::string(exam::to_string(unit.target_level));
}

mmdp::AgentAction unit_action(const PracticeUnit& unit) {
  return mmdp::AgentAction{unit_text(unit),
                           {{"skill", unit.skill_id},
                            {"count", std::to_string(unit.item_count)},
                            {"level", std::to_string(exam::to_int(unit.target_level))}}};
}

PracticeUnit unit_from_action(const mmdp::AgentAction& action) {
  const auto& a = action.annotations;
  if (!a.count("skill") || !a.count("count") || !a.count("level")) {
    fail(ErrorCode::Format, "action '" + action.text + "' is not a practice unit");
  }
  PracticeUnit u;
  u.skill_id = a.at("skill");
  u.item_count = std::stoi(a.at("count"));
  auto level = exam::level_from_int(std::stoi(a.at("level")));
  if (!level) fail(ErrorCode::Format, "bad practice level");
  u.target_level = *level;
  return u;
}

PracticeProposer::PracticeProposer(int items_per_unit, double reuse)
    : items_per_unit_(items_per_unit), reuse_(reuse) {
  if (items_per_unit < 1) fail(ErrorCode::Config, "items per unit must be >= 1");
  if (!(reuse >= 0.0 && reuse <= 1.0)) fail(ErrorCode::Config, "reuse must lie in [0, 1]");
}

std::vector<PracticeUnit> PracticeProposer::candidates(const std::string& skill_id) const {
  std::vector<PracticeUnit> out;
  for (auto level : exam::kLevels) out.push_back({skill_id, items_per_unit_, level});
  return out;
}

std::vector<mmdp::WeightedAction> PracticeProposer::propose(const mmdp::EnvState& state,
                                                            const memory::Case* retrieved) const {
  auto focus = state.annotations.find("focus");
  if (focus == state.annotations.end()) fail(ErrorCode::Contract, "path state has no focus skill");
  const auto units = candidates(focus->second);
  const double n = static_cast<double>(units.size());
  bool known = false;
  if (retrieved) {
    for (const auto& u : units) known = known || unit_text(u) == retrieved->action_text;
  }
  std::vector<mmdp::WeightedAction> out;
  for (const auto& u : units) {
    double p = 1.0 / n;
    if (known) p = (unit_text(u) == retrieved->action_text ? reuse_ : 0.0) + (1.0 - reuse_) / n;
    out.push_back({unit_action(u), p});
  }
  return out;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

}  // namespace

mmdp::EnvState path_state(const StudentProfile& profile, const GapReport& gaps,
                          const std::string& focus) {
  std::string text = "mastery";
  for (const auto& [skill, m] : profile.mastery) text += " " + skill + "=" + fixed2(m);
  text += "; gaps";
  for (const auto& g : gaps.gaps) text += " " + g + ":" + fixed2(gaps.severity(g));
  text += "; focus " + focus;
  return mmdp::EnvState{text, {{"focus", focus}}};
}

StudyPlan recommend_path(const StudentProfile& profile, const GapReport& gaps,
                         const SkillOntology& ontology, mmdp::CbrMemory& memory,
                         const PathConfig& config, std::uint64_t seed,
                         std::vector<PathDecision>* decisions) {
  StudyPlan plan;
  if (gaps.gaps.empty()) {
    plan.rationale = "no gaps";
    return plan;
  }
  PracticeProposer proposer(config.items_per_unit, config.reuse);
  mmdp::Rng rng(seed);
  plan.rationale = "targets " + std::to_string(gaps.gaps.size()) + " skill gap(s) by error rate:";
  for (const auto& skill : gaps.gaps) {
    if (!ontology.find(skill)) fail(ErrorCode::Reference, "gap names unknown skill '" + skill + "'");
    auto state = path_state(profile, gaps, skill);
    auto decision =
        mmdp::cbr_action(state, memory, config.retrieval, proposer, rng, mmdp::Selection::Greedy);
    plan.units.push_back(unit_from_action(decision.action));
    plan.rationale += " " + skill + " (" + fixed2(gaps.severity(skill)) + ")";
    if (decisions) decisions->push_back({std::move(state), std::move(decision)});
  }
  return plan;
}

double guess_floor(Section section) noexcept {
  switch (section) {
    case Section::I: return 0.25;
    case Section::II: return 0.5;
    case Section::III: return 0.0;
  }
  return 0.0;
}

StudentStep simulate_student_step(StudentProfile profile, const exam::ExamItem& item,
                                  const SkillOntology& ontology, mmdp::Rng& rng, StudentMode mode,
                                  double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidArgument, "learning rate must lie in [0, 1]");
  auto skill = ontology.skill_for(item.topic, item.level);
  if (!skill) fail(ErrorCode::Simulation, "item " + exam::render(item.id) + " has no mapped skill");
  double& m = profile.mastery[*skill];
  m = std::clamp(m, 0.0, 1.0);
  const double g = guess_floor(item.section());
  const double p = g + (1.0 - g) * m;

  StudentStep out;
  bool correct = false;
  if (const auto* mcq = std::get_if<exam::MultipleChoice>(&item.body)) {
    correct = rng.bernoulli(p);
    int chosen = mcq->key;
    if (!correct) {
      const int k = static_cast<int>(rng.index(3));
      chosen = k >= mcq->key ? k + 1 : k;
    }
    out.response = exam::ChoiceResponse{chosen};
  } else if (const auto* tf = std::get_if<exam::TrueFalseGroup>(&item.body)) {
    exam::TruthResponse r;
    correct = true;
    for (int k = 0; k < 4; ++k) {
      const bool ok = rng.bernoulli(p);
      r.values[k] = ok ? tf->key[k] : !tf->key[k];
      correct = correct && ok;
    }
    out.response = r;
  } else {
    const auto& sa = std::get<exam::ShortAnswer>(item.body);
    correct = rng.bernoulli(p);
    out.response = exam::NumericResponse{correct ? sa.key : sa.key + 1.0};
  }
  if (mode == StudentMode::Practice) m = std::clamp(m + eta * (1.0 - m), 0.0, 1.0);
  profile.history.push_back({exam::render(item.id), *skill, correct,
                             static_cast<std::int64_t>(profile.history.size()) + 1});
  out.profile = std::move(profile);
  return out;
}

Assessment assess(StudentProfile& profile, const exam::Exam& exam, const SkillOntology& ontology,
                  mmdp::Rng& rng) {
  std::vector<exam::Response> responses;
  for (const auto& item : exam.items) {
    auto step = simulate_student_step(std::move(profile), item, ontology, rng, StudentMode::Assess);
    profile = std::move(step.profile);
    responses.push_back(std::move(step.response));
  }
  auto score = exam::score_exam(exam, responses);
  Assessment a;
  a.attempts = skill_attempts(exam, score, ontology);
  a.score = score.normalized();
  a.item_scores = std::move(score.items);
  return a;
}

int repeated_error_skills(std::span<const SkillAttempt> attempts) {
  std::map<std::string, int> errors;
  for (const auto& a : attempts) {
    if (!a.correct) ++errors[a.skill_id];
  }
  return static_cast<int>(
      std::count_if(errors.begin(), errors.end(), [](const auto& e) { return e.second >= 2; }));
}

TutoringMetrics tutoring_metrics(std::span<const StudentHistory> histories) {
  TutoringMetrics m;
  double sum = 0.0;
  for (const auto& h : histories) {
    if (!h.post) {
      m.flags.push_back(h.student_id + ": no post assessment");
      continue;
    }
    const double d = h.post->score - h.pre.score;
    m.student_deltas.push_back(d);
    sum += d;
    m.repeated_before += repeated_error_skills(h.pre.attempts);
    m.repeated_after += repeated_error_skills(h.post->attempts);
  }
  if (!m.student_deltas.empty()) {
    m.delta_score = sum / static_cast<double>(m.student_deltas.size());
    if (m.repeated_before > 0) {
      m.path_effectiveness =
          100.0 * (1.0 - static_cast<double>(m.repeated_after) / static_cast<double>(m.repeated_before));
    } else {
      m.flags.push_back("no repeated-error skills before the plan");
    }
  } else {
    m.flags.push_back("no post assessments");
  }
  return m;
}

CohortResult run_tutoring_cohort(const exam::Exam& exam, const SkillOntology& ontology,
                                 mmdp::CbrMemory& memory, const CohortConfig& config) {
  if (config.students < 1) fail(ErrorCode::Config, "cohort needs at least one student");
  if (!(config.mastery_low >= 0.0 && config.mastery_low <= config.mastery_high &&
        config.mastery_high <= 1.0)) {
    fail(ErrorCode::Config, "initial mastery range must lie within [0, 1]");
  }
  CohortResult out;
  mmdp::Rng master(config.seed);
  const mmdp::CompositeRewardConfig reward_weights{1.0, 1.0, 1.0};
  for (int i = 0; i < config.students; ++i) {
    mmdp::Rng rng = master.fork();
    StudentProfile profile;
    profile.student_id = "student-" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    for (const auto& s : ontology.skills()) {
      profile.mastery[s.id] =
          config.mastery_low + (config.mastery_high - config.mastery_low) * rng.uniform();
    }
    StudentHistory h;
    h.student_id = profile.student_id;
    h.mastery_before = profile.mastery;
    h.pre = assess(profile, exam, ontology, rng);

    std::vector<exam::ItemScore> pre_scores = h.pre.item_scores;
    exam::ExamScore graded;
    graded.items = pre_scores;
    const auto gaps = analyze_errors(exam, graded, ontology, config.gaps);
    std::vector<PathDecision> decisions;
    h.plan = recommend_path(profile, gaps, ontology, memory, config.path, rng.next(), &decisions);

    for (const auto& unit : h.plan.units) {
      std::vector<const exam::ExamItem*> pool;
      for (const auto& item : exam.items) {
        if (ontology.skill_for(item.topic, item.level) == unit.skill_id &&
            item.level == unit.target_level) {
          pool.push_back(&item);
        }
      }
      if (pool.empty()) {
        for (const auto& item : exam.items) {
          if (ontology.skill_for(item.topic, item.level) == unit.skill_id) pool.push_back(&item);
        }
      }
      if (pool.empty()) continue;
      for (int k = 0; k < unit.item_count; ++k) {
        auto step = simulate_student_step(std::move(profile), *pool[static_cast<std::size_t>(k) % pool.size()],
                                          ontology, rng, StudentMode::Practice, config.eta);
        profile = std::move(step.profile);
      }
    }
    h.post = assess(profile, exam, ontology, rng);
    h.mastery_after = profile.mastery;

    const double delta = h.post->score - h.pre.score;
    const double reward = mmdp::composite_reward(delta / 100.0, 0.0, 1.0, reward_weights);
    for (std::size_t u = 0; u < decisions.size(); ++u) {
      memory::Case c;
      c.case_id = "tutor-" + std::to_string(memory.bank().next_seq());
      c.state_text = decisions[u].state.text;
      c.action_text = decisions[u].decision.action.text;
      c.reward = reward;
      c.success = delta > 0.0;
      c.annotations = {{"student", h.student_id}, {"skill", h.plan.units[u].skill_id}};
      const auto& kept = memory.retain(std::move(c));
      out.retained_case_ids.push_back(kept.case_id);
      const auto s = memory.embed(decisions[u].state.text);
      for (const auto& r : decisions[u].decision.retrieval.cases) {
        memory.estimator().add_record(memory.bank().at(r.index).case_id, retrieval::Record{s, reward});
      }
      memory.estimator().add_record(kept.case_id, retrieval::Record{s, reward});
    }
    out.histories.push_back(std::move(h));
  }
  out.metrics = tutoring_metrics(out.histories);
  return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json assessment_json(const Assessment& a) {
  ordered_json j;
  j["score"] = a.score;
  ordered_json items = ordered_json::array();
  for (const auto& s : a.item_scores) {
    items.push_back({{"points", s.points},
                     {"max_points", s.max_points},
                     {"correct_parts", s.correct_parts},
                     {"fully_correct", s.fully_correct},
                     {"answered", s.answered}});
  }
  j["item_scores"] = std::move(items);
  ordered_json attempts = ordered_json::array();
  for (const auto& t : a.attempts) {
    attempts.push_back({{"item_id", t.item_id}, {"skill_id", t.skill_id}, {"correct", t.correct}});
  }
  j["attempts"] = std::move(attempts);
  return j;
}

Assessment assessment_from(const ordered_json& j) {
  Assessment a;
  a.score = j.at("score").get<double>();
  for (const auto& s : j.at("item_scores")) {
    exam::ItemScore is;
    is.points = s.at("points").get<double>();
    is.max_points = s.at("max_points").get<double>();
    is.correct_parts = s.at("correct_parts").get<int>();
    is.fully_correct = s.at("fully_correct").get<bool>();
    is.answered = s.at("answered").get<bool>();
    a.item_scores.push_back(is);
  }
  for (const auto& t : j.at("attempts")) {
    a.attempts.push_back({t.at("item_id").get<std::string>(), t.at("skill_id").get<std::string>(),
                          t.at("correct").get<bool>()});
  }
  return a;
}

}  // namespace

void write_histories(std::span<const StudentHistory> histories, std::ostream& out) {
  for (const auto& h : histories) {
    ordered_json j;
    j["student_id"] = h.student_id;
    j["mastery_before"] = h.mastery_before;
    j["mastery_after"] = h.mastery_after;
    j["pre"] = assessment_json(h.pre);
    j["post"] = h.post ? assessment_json(*h.post) : ordered_json(nullptr);
    ordered_json units = ordered_json::array();
    for (const auto& u : h.plan.units) {
      units.push_back({{"skill_id", u.skill_id},
                       {"item_count", u.item_count},
                       {"target_level", exam::to_int(u.target_level)}});
    }
    j["plan"] = {{"units", std::move(units)}, {"rationale", h.plan.rationale}};
    out << j.dump() << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing student histories");
}

std::vector<StudentHistory> read_histories(std::istream& in) {
  std::vector<StudentHistory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = ordered_json::parse(line);
      StudentHistory h;
      h.student_id = j.at("student_id").get<std::string>();
      h.mastery_before = j.at("mastery_before").get<std::map<std::string, double>>();
      h.mastery_after = j.at("mastery_after").get<std::map<std::string, double>>();
      h.pre = assessment_from(j.at("pre"));
      if (!j.at("post").is_null()) h.post = assessment_from(j.at("post"));
      for (const auto& u : j.at("plan").at("units")) {
        auto level = exam::level_from_int(u.at("target_level").get<int>());
        if (!level) fail(ErrorCode::Format, "bad target level");
        h.plan.units.push_back({u.at("skill_id").get<std::string>(), u.at("item_count").get<int>(), *level});
      }
      h.plan.rationale = j.at("plan").at("rationale").get<std::string>();
      out.push_back(std::move(h));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mathprep::agents
