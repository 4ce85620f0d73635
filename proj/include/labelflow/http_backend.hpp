#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "labelflow/agent.hpp"

namespace labelflow {

struct HttpBackendConfig {
  std::string endpoint;  // full URL of the chat-completions resource
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{120};

  // MODEL_ENDPOINT, MODEL_KEY and MODEL_NAME. Throws ConfigError naming the
  // first missing variable.
  static HttpBackendConfig from_env();
};

// Chat-completion wire format: function specs become JSON-schema "tools",
// tool calls and results travel as assistant/tool messages.
nlohmann::json to_wire(const FunctionSpec& spec);
nlohmann::json build_chat_request(const Conversation& conversation, const std::vector<FunctionSpec>& functions,
                                  const std::string& model);

// Throws BackendFailure (not retriable) on a response without a usable choice.
ModelReply parse_chat_response(const nlohmann::json& response);

class HttpBackend final : public ModelBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ModelReply complete(const Conversation& conversation, const std::vector<FunctionSpec>& functions) override;

 private:
  HttpBackendConfig config_;
  std::string base_url_;
  std::string path_;
};

}  // namespace labelflow
