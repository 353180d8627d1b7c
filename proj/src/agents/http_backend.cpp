#include "mathprep/agents/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "mathprep/error.hpp"

namespace mathprep::agents {

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_environment() {
  HttpBackendConfig cfg;
  cfg.base_url = env_or_empty("MATHPREP_BACKEND_URL");
  cfg.api_key = env_or_empty("MATHPREP_API_KEY");
  cfg.model = env_or_empty("MATHPREP_MODEL");
  if (cfg.base_url.empty()) fail(ErrorCode::Config, "MATHPREP_BACKEND_URL is not set");
  if (cfg.model.empty()) fail(ErrorCode::Config, "MATHPREP_MODEL is not set");
  return cfg;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.find("://") == std::string::npos) {
    fail(ErrorCode::Config, "backend URL needs a scheme: '" + config_.base_url + "'");
  }
}

std::string HttpBackend::complete(const std::string& system,
                                  const std::vector<ChatMessage>& messages,
                                  const DecodeParams& params, std::uint64_t seed) {
  // Split "scheme://host:port/prefix" into the client origin and path prefix.
  const auto scheme_end = config_.base_url.find("://") + 3;
  const auto path_start = config_.base_url.find('/', scheme_end);
  const std::string origin = config_.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  nlohmann::json body;
  body["model"] = config_.model;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  body["seed"] = seed;
  body["messages"] = nlohmann::json::array();
  if (!system.empty()) body["messages"].push_back({{"role", "system"}, {"content", system}});
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(origin);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) fail(ErrorCode::Backend, "request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    fail(ErrorCode::Backend, "backend returned HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
  }
  try {
    auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Backend, std::string("unexpected backend reply: ") + e.what());
  }
}

}  // namespace mathprep::agents
