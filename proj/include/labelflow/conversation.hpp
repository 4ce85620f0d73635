#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "labelflow/tool_registry.hpp"

namespace labelflow {

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role r);

struct Message {
  Role role = Role::user;
  std::string content;
  std::vector<ToolCall> tool_calls;       // assistant only
  std::optional<ToolResult> tool_result;  // tool only; body mirrors content
  std::uint64_t created_seq = 0;
};

// System prompt at index 0 followed by the ordered exchange. append() keeps
// the structural invariants: a single leading system message, tool calls only
// on assistant turns, and tool results answering an earlier call.
class Conversation {
 public:
  explicit Conversation(std::string system_prompt);

  const Message& append_user(std::string content);
  const Message& append_assistant(std::string content, std::vector<ToolCall> tool_calls = {});
  const Message& append_tool(ToolResult result);

  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  const Message& system() const { return messages_.front(); }

  // Content edits are restricted to non-system messages; used by the pruner.
  void set_content(std::size_t index, std::string content);

 private:
  const Message& push(Message m);

  std::vector<Message> messages_;
  std::uint64_t next_seq_ = 0;
};

nlohmann::json to_json(const Message& m);

}  // namespace labelflow
