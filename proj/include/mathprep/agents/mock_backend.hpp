#pragma once

#include <map>
#include <set>
#include <string>

#include "mathprep/agents/backend.hpp"
#include "mathprep/exam/types.hpp"

namespace mathprep::agents {

/// Deterministic stand-in for a language model.
///
/// TASK generate: fills a per-section template for the requested blueprint
/// cell and returns the item as JSON on the ANSWER line.
/// TASK solve: answers from its knowledge table unless the item is withheld;
/// otherwise reuses the action of a retrieved case whose state equals the
/// stem and whose reward is 1; otherwise abstains with "ANSWER: UNKNOWN".
class MockBackend final : public ChatBackend {
 public:
  std::string id() const override { return "mock"; }
  bool deterministic() const override { return true; }
  std::string complete(const std::string& system, const std::vector<ChatMessage>& messages,
                       const DecodeParams& params, std::uint64_t seed) override;

  /// Adds every item's key to the knowledge table.
  void learn(const exam::Exam& exam);
  void learn(const exam::ExamItem& item);
  /// Items (rendered ids) the mock pretends not to know.
  void withhold(const std::string& item_id) { withheld_.insert(item_id); }
  /// Items for which solve returns text without an ANSWER line.
  void garble(const std::string& item_id) { garbled_.insert(item_id); }
  /// The next n generate calls return unparseable text.
  void fail_next_generations(int n) { failing_generations_ = n; }

  std::size_t calls() const noexcept { return calls_; }

 private:
  std::string generate(const Prompt& prompt, std::uint64_t seed);
  std::string solve(const Prompt& prompt, std::uint64_t seed) const;

  std::map<std::string, std::string> knowledge_;  // one-line stem -> answer
  std::set<std::string> withheld_;
  std::set<std::string> garbled_;
  int failing_generations_ = 0;
  std::size_t calls_ = 0;
};

/// Renders the canonical answer text for a key ("B", "T,F,T,T", "3200").
std::string answer_text(const exam::ExamItem& item);

}  // namespace mathprep::agents
