#include "labelflow/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

namespace labelflow {

using nlohmann::json;

namespace {

std::string require_env(const char* name) {
  const char* value = std::getenv(name);
  if (!value || !*value) throw ConfigError(std::string("environment variable ") + name + " is not set");
  return value;
}

std::string_view json_type(ParamType t) {
  switch (t) {
    case ParamType::number:
      return "number";
    default:
      return "string";
  }
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig c;
  c.endpoint = require_env("MODEL_ENDPOINT");
  c.api_key = require_env("MODEL_KEY");
  c.model = require_env("MODEL_NAME");
  return c;
}

json to_wire(const FunctionSpec& spec) {
  json properties = json::object();
  json required = json::array();
  for (const auto& p : spec.params) {
    json prop{{"type", json_type(p.type)}, {"description", p.description}};
    if (p.type == ParamType::date) prop["format"] = "date";
    if (!p.enum_values.empty()) prop["enum"] = p.enum_values;
    properties[p.name] = std::move(prop);
    if (p.required) required.push_back(p.name);
  }
  return {{"type", "function"},
          {"function",
           {{"name", spec.name},
            {"description", spec.description},
            {"parameters", {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

json build_chat_request(const Conversation& conversation, const std::vector<FunctionSpec>& functions,
                        const std::string& model) {
  json messages = json::array();
  for (const auto& m : conversation.messages()) {
    json wire{{"role", to_string(m.role)}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
      json calls = json::array();
      for (const auto& c : m.tool_calls) {
        calls.push_back({{"id", c.call_id},
                         {"type", "function"},
                         {"function", {{"name", c.name}, {"arguments", c.args.dump()}}}});
      }
      wire["tool_calls"] = std::move(calls);
    }
    if (m.tool_result) wire["tool_call_id"] = m.tool_result->call_id;
    messages.push_back(std::move(wire));
  }
  json tools = json::array();
  for (const auto& f : functions) tools.push_back(to_wire(f));
  json request{{"model", model}, {"messages", std::move(messages)}};
  if (!tools.empty()) request["tools"] = std::move(tools);
  return request;
}

ModelReply parse_chat_response(const json& response) {
  if (!response.is_object() || !response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    throw BackendFailure("response has no choices", false);
  }
  const json& message = response["choices"][0].value("message", json::object());
  if (message.contains("tool_calls") && message["tool_calls"].is_array() && !message["tool_calls"].empty()) {
    ToolCallsReply reply;
    if (message.contains("content") && message["content"].is_string()) reply.content = message["content"];
    for (const auto& c : message["tool_calls"]) {
      ToolCall call;
      call.call_id = c.value("id", "");
      const json& fn = c.value("function", json::object());
      call.name = fn.value("name", "");
      std::string arguments = fn.value("arguments", "{}");
      call.args = json::parse(arguments, nullptr, false);
      if (call.args.is_discarded()) throw BackendFailure("tool call arguments are not JSON: " + arguments, false);
      reply.calls.push_back(std::move(call));
    }
    return reply;
  }
  if (message.contains("content") && message["content"].is_string()) {
    return FinalReply{message["content"].get<std::string>()};
  }
  throw BackendFailure("choice carries neither tool calls nor content", false);
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("MODEL_ENDPOINT must be an absolute http(s) URL");
  auto path_start = url.find('/', scheme_end + 3);
  base_url_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

ModelReply HttpBackend::complete(const Conversation& conversation, const std::vector<FunctionSpec>& functions) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  const std::string body = build_chat_request(conversation, functions, config_.model).dump();

  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) throw BackendFailure("request failed: " + httplib::to_string(res.error()), true);
  const int status = res->status;
  if (status != 200) {
    bool retriable = status == 408 || status == 409 || status == 429 || status >= 500;
    throw BackendFailure("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 512), retriable);
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw BackendFailure("response body is not JSON", false);
  return parse_chat_response(parsed);
}

}  // namespace labelflow
