#pragma once

#include <string>

#include "mathprep/agents/backend.hpp"

namespace mathprep::agents {

/// Endpoint settings for a chat-completion service.
struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key;
  std::string model;
  int timeout_seconds = 120;

  /// Reads MATHPREP_BACKEND_URL, MATHPREP_API_KEY and MATHPREP_MODEL.
  /// Throws Error(Config) when the URL or model is missing.
  static HttpBackendConfig from_environment();
};

/// POSTs {model, messages, temperature, max_tokens, seed} to
/// <base_url>/chat/completions and returns choices[0].message.content.
/// One request in flight at a time.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string id() const override { return "http:" + config_.model; }
  bool deterministic() const override { return false; }
  std::string complete(const std::string& system, const std::vector<ChatMessage>& messages,
                       const DecodeParams& params, std::uint64_t seed) override;

 private:
  HttpBackendConfig config_;
};

}  // namespace mathprep::agents
