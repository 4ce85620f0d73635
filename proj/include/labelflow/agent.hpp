#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "labelflow/conversation.hpp"
#include "labelflow/ehr_store.hpp"
#include "labelflow/pruner.hpp"
#include "labelflow/token_counter.hpp"
#include "labelflow/tool_registry.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(TurnLimitExceeded);

class BackendFailure : public Error {
 public:
  BackendFailure(const std::string& detail, bool retriable) : Error("BackendFailure", detail), retriable_(retriable) {}
  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

struct ToolCallsReply {
  std::vector<ToolCall> calls;
  std::string content;  // optional reasoning text accompanying the calls
};

struct FinalReply {
  std::string text;
};

using ModelReply = std::variant<ToolCallsReply, FinalReply>;

// Language-model contract. Implementations must tolerate concurrent calls for
// distinct conversations.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual ModelReply complete(const Conversation& conversation, const std::vector<FunctionSpec>& functions) = 0;
};

struct AgentConfig {
  PrunerConfig pruner;
  std::size_t turn_cap = 32;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{250};
  std::shared_ptr<const TokenCounter> counter = std::make_shared<HeuristicCounter>();
};

struct ToolCallLogEntry {
  std::string name;
  nlohmann::json args;
  std::size_t records_count = 0;
  ToolStatus status = ToolStatus::ok;
};

struct AgentTranscript {
  std::string patient_id;
  std::string final_text;
  std::vector<Message> messages;  // every message as appended, before pruning
  std::vector<ToolCallLogEntry> tool_call_log;
  std::size_t turns = 0;
  std::size_t pruned_tokens_total = 0;
};

// System prompt carrying the whitelisted function catalog.
std::string build_system_prompt(const ToolRegistry& registry);

// Runs one conversation to completion: ask the backend, execute any tool
// calls in order, prune, repeat until a final answer arrives.
//
// Throws TurnLimitExceeded, BackendFailure (after retries for retriable
// failures) or ContextInfeasible.
AgentTranscript run_agent(const std::string& patient_id, const std::string& prompt, const ToolRegistry& registry,
                          const Store& store, ModelBackend& backend, const AgentConfig& config = {});

}  // namespace labelflow
