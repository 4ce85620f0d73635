#include "labelflow/conversation.hpp"

#include <stdexcept>

namespace labelflow {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
    case Role::tool:
      return "tool";
  }
  return "user";
}

Conversation::Conversation(std::string system_prompt) {
  Message m;
  m.role = Role::system;
  m.content = std::move(system_prompt);
  push(std::move(m));
}

const Message& Conversation::push(Message m) {
  m.created_seq = next_seq_++;
  messages_.push_back(std::move(m));
  return messages_.back();
}

const Message& Conversation::append_user(std::string content) {
  Message m;
  m.role = Role::user;
  m.content = std::move(content);
  return push(std::move(m));
}

const Message& Conversation::append_assistant(std::string content, std::vector<ToolCall> tool_calls) {
  Message m;
  m.role = Role::assistant;
  m.content = std::move(content);
  m.tool_calls = std::move(tool_calls);
  return push(std::move(m));
}

const Message& Conversation::append_tool(ToolResult result) {
  bool matched = false;
  for (auto it = messages_.rbegin(); it != messages_.rend() && !matched; ++it) {
    if (it->role != Role::assistant) continue;
    for (const auto& call : it->tool_calls) matched = matched || call.call_id == result.call_id;
  }
  if (!matched) throw std::logic_error("tool result '" + result.call_id + "' answers no prior tool call");
  Message m;
  m.role = Role::tool;
  m.content = result.body;
  m.tool_result = std::move(result);
  return push(std::move(m));
}

void Conversation::set_content(std::size_t index, std::string content) {
  if (index == 0 || index >= messages_.size()) throw std::out_of_range("set_content: bad message index");
  Message& m = messages_[index];
  if (m.tool_result) m.tool_result->body = content;
  m.content = std::move(content);
}

nlohmann::json to_json(const Message& m) {
  nlohmann::json j{{"seq", m.created_seq}, {"role", to_string(m.role)}, {"content", m.content}};
  if (!m.tool_calls.empty()) {
    j["tool_calls"] = nlohmann::json::array();
    for (const auto& c : m.tool_calls) j["tool_calls"].push_back({{"call_id", c.call_id}, {"name", c.name}, {"args", c.args}});
  }
  if (m.tool_result) {
    j["tool_result"] = {{"call_id", m.tool_result->call_id},
                        {"status", to_string(m.tool_result->status)},
                        {"records_count", m.tool_result->records_count}};
  }
  return j;
}

}  // namespace labelflow
