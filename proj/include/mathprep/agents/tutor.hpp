#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mathprep/exam/blueprint.hpp"
#include "mathprep/exam/grading.hpp"
#include "mathprep/mmdp/policy.hpp"

namespace mathprep::agents {

struct Skill {
  std::string id;
  std::string topic;
  exam::CognitiveLevel level = exam::CognitiveLevel::Recognition;
};

class SkillOntology {
 public:
  using CellIndex = std::map<std::pair<std::string, exam::CognitiveLevel>, std::vector<std::string>>;

  SkillOntology() = default;
  /// Throws Error(Reference) when a mapping names an unknown skill.
  SkillOntology(std::vector<Skill> skills, CellIndex cells);

  /// One skill per topic ("S<topic code>") covering all of its levels; the
  /// skill's level is the highest level the matrix requires for the topic.
  static SkillOntology per_topic(const exam::SpecificationMatrix& matrix);

  const std::vector<Skill>& skills() const noexcept { return skills_; }
  const Skill* find(const std::string& skill_id) const;
  /// First skill mapped to the cell, if any.
  std::optional<std::string> skill_for(const std::string& topic, exam::CognitiveLevel level) const;
  /// Throws Error(Reference) unless every required cell maps to a skill.
  void check_covers(const exam::SpecificationMatrix& matrix) const;

 private:
  std::vector<Skill> skills_;
  CellIndex cells_;
};

struct Attempt {
  std::string item_id;
  std::string skill_id;
  bool correct = false;
  std::int64_t timestamp = 0;
};

struct StudentProfile {
  std::string student_id;
  std::map<std::string, double> mastery;  // clamped to [0, 1]
  std::vector<Attempt> history;
};

/// One graded attempt at skill granularity. A Section II item yields four
/// attempts, one per statement; other items yield one.
struct SkillAttempt {
  std::string item_id;
  std::string skill_id;
  bool correct = false;
  bool operator==(const SkillAttempt&) const = default;
};

/// Items whose (topic, level) has no skill are listed in `unmapped`.
std::vector<SkillAttempt> skill_attempts(const exam::Exam& exam, const exam::ExamScore& score,
                                         const SkillOntology& ontology,
                                         std::vector<std::string>* unmapped = nullptr);

struct GapConfig {
  double threshold = 0.5;  // gap when error rate exceeds this
  int min_attempts = 2;
};

struct SkillStat {
  std::string skill_id;
  int attempts = 0;
  int errors = 0;
  double error_rate = 0.0;
  bool gap = false;
};

struct GapReport {
  std::vector<SkillStat> stats;      // by skill id
  std::vector<std::string> gaps;     // by error rate desc, ties by skill id
  std::vector<std::string> unmapped;  // item ids
  double severity(const std::string& skill_id) const;
};

/// Per-skill error counts and rates of a graded exam. Unmapped items are
/// reported, not fatal.
GapReport analyze_errors(const exam::Exam& exam, const exam::ExamScore& score,
                         const SkillOntology& ontology, const GapConfig& config = {});

struct PracticeUnit {
  std::string skill_id;
  int item_count = 0;
  exam::CognitiveLevel target_level = exam::CognitiveLevel::Recognition;
  bool operator==(const PracticeUnit&) const = default;
};

std::string unit_text(const PracticeUnit& unit);
mmdp::AgentAction unit_action(const PracticeUnit& unit);
/// Inverse of unit_action. Throws Error(Format).
PracticeUnit unit_from_action(const mmdp::AgentAction& action);

struct StudyPlan {
  std::vector<PracticeUnit> units;
  std::string rationale;
};

/// Candidate units for the state's "focus" skill, one per target level.
/// Reuses a retrieved case's unit with probability `reuse`.
class PracticeProposer final : public mmdp::ActionProposer {
 public:
  explicit PracticeProposer(int items_per_unit = 32, double reuse = 0.8);
  std::vector<mmdp::WeightedAction> propose(const mmdp::EnvState& state,
                                            const memory::Case* retrieved) const override;
  std::vector<PracticeUnit> candidates(const std::string& skill_id) const;

 private:
  int items_per_unit_;
  double reuse_;
};

/// State text for the unit decision on `focus`: the profile's mastery, the
/// gap list and the focus skill.
mmdp::EnvState path_state(const StudentProfile& profile, const GapReport& gaps,
                          const std::string& focus);

struct PathConfig {
  retrieval::RetrievalConfig retrieval;
  int items_per_unit = 32;
  double reuse = 0.8;
};

struct PathDecision {
  mmdp::EnvState state;
  mmdp::CbrDecision decision;
};

/// One unit per gap, in gap order, each chosen greedily by cbr_action over
/// that skill's candidate units. No gaps gives an empty plan with a
/// "no gaps" rationale. Throws Error(Reference) for a gap outside the
/// ontology.
StudyPlan recommend_path(const StudentProfile& profile, const GapReport& gaps,
                         const SkillOntology& ontology, mmdp::CbrMemory& memory,
                         const PathConfig& config, std::uint64_t seed,
                         std::vector<PathDecision>* decisions = nullptr);

enum class StudentMode { Assess, Practice };

/// Guess floor g of an item format: 0.25, 0.5 per statement, 0.
double guess_floor(exam::Section section) noexcept;

struct StudentStep {
  exam::Response response;
  StudentProfile profile;
};

/// Answers with P(correct) = g + (1 - g) mastery (per statement in Section
/// II) and appends the attempt to the history. Practice also raises
/// mastery by eta (1 - mastery). Throws Error(Simulation) when the item has
/// no skill.
StudentStep simulate_student_step(StudentProfile profile, const exam::ExamItem& item,
                                  const SkillOntology& ontology, mmdp::Rng& rng,
                                  StudentMode mode = StudentMode::Assess, double eta = 0.1);

struct Assessment {
  std::vector<exam::ItemScore> item_scores;
  std::vector<SkillAttempt> attempts;
  double score = 0.0;  // 0..100
};

Assessment assess(StudentProfile& profile, const exam::Exam& exam, const SkillOntology& ontology,
                  mmdp::Rng& rng);

struct StudentHistory {
  std::string student_id;
  std::map<std::string, double> mastery_before;
  std::map<std::string, double> mastery_after;
  Assessment pre;
  std::optional<Assessment> post;
  StudyPlan plan;
};

/// Skills with at least two wrong attempts.
int repeated_error_skills(std::span<const SkillAttempt> attempts);

struct TutoringMetrics {
  std::optional<double> delta_score;         // mean post - pre, 0..100 scale
  std::optional<double> path_effectiveness;  // 100 (1 - after / before)
  std::vector<double> student_deltas;
  int repeated_before = 0;
  int repeated_after = 0;
  std::vector<std::string> flags;
};

/// Students without a post assessment are flagged and left out.
TutoringMetrics tutoring_metrics(std::span<const StudentHistory> histories);

struct CohortConfig {
  int students = 20;
  std::uint64_t seed = 0;
  double eta = 0.1;
  double mastery_low = 0.0;
  double mastery_high = 0.4;
  GapConfig gaps;
  PathConfig path;
};

struct CohortResult {
  std::vector<StudentHistory> histories;
  TutoringMetrics metrics;
  std::vector<std::string> retained_case_ids;
};

/// Pre-assessment, gap analysis, study plan, practice on exam items of each
/// planned skill, post-assessment on the same exam. Each planned unit is
/// retained in the tutor's bank with a composite reward of (delta / 100,
/// 0, plan completed).
CohortResult run_tutoring_cohort(const exam::Exam& exam, const SkillOntology& ontology,
                                 mmdp::CbrMemory& memory, const CohortConfig& config);

/// JSON Lines, one student per line.
void write_histories(std::span<const StudentHistory> histories, std::ostream& out);
std::vector<StudentHistory> read_histories(std::istream& in);

}  // namespace mathprep::agents
