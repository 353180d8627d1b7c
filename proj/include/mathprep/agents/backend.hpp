#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mathprep::agents {

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 2048;
};

/// Chat-completion contract. The final answer travels on a line that starts
/// with "ANSWER:".
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string id() const = 0;
  /// True when complete() is a pure function of its arguments.
  virtual bool deterministic() const = 0;
  /// Throws Error(Backend) on transport failure.
  virtual std::string complete(const std::string& system, const std::vector<ChatMessage>& messages,
                               const DecodeParams& params, std::uint64_t seed) = 0;
};

// Prompts open with "TASK: <kind>" followed by "KEY: value" header lines,
// a blank line, then free text.
struct Prompt {
  std::string task;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::string render() const;
  std::optional<std::string> header(std::string_view key) const;
};

/// Inverse of Prompt::render. Returns nullopt when the text has no TASK line.
std::optional<Prompt> parse_prompt(std::string_view text);

/// Payload of the last "ANSWER:" line, trimmed.
std::optional<std::string> extract_answer(std::string_view completion);

/// Non-empty lines starting with "Step" (case-insensitive) before the answer.
std::vector<std::string> extract_steps(std::string_view completion);

/// Escapes newlines so a text fits on one prompt line, and back.
std::string one_line(std::string_view text);
std::string from_one_line(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace mathprep::agents
