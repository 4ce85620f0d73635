#include "labelflow/agent.hpp"

#include <stdexcept>
#include <thread>

namespace labelflow {

namespace {

ModelReply complete_with_retry(ModelBackend& backend, const Conversation& conversation,
                               const std::vector<FunctionSpec>& functions, const AgentConfig& config) {
  for (int attempt = 1;; ++attempt) {
    try {
      ModelReply reply = backend.complete(conversation, functions);
      if (auto* calls = std::get_if<ToolCallsReply>(&reply); calls && calls->calls.empty()) {
        throw BackendFailure("backend returned an empty tool call list", false);
      }
      return reply;
    } catch (const BackendFailure& failure) {
      if (!failure.retriable() || attempt >= config.max_attempts) throw;
      std::this_thread::sleep_for(config.backoff_base * (1 << (attempt - 1)));
    }
  }
}

void prune_into(Conversation& conversation, const AgentConfig& config, AgentTranscript& transcript) {
  PruneReport report;
  conversation = prune_context(std::move(conversation), config.pruner, *config.counter, &report);
  transcript.pruned_tokens_total += report.tokens_before - report.tokens_after;
}

}  // namespace

std::string build_system_prompt(const ToolRegistry& registry) {
  return "You are a radiation oncology research assistant with access to patient records through whitelisted "
         "functions. Decide which functions to call, call them as often as needed, and stop once you can answer "
         "the task. Every retrieval function reports a 'number of records count' and lists records newest first; "
         "when nothing matches it says that no data could be found.\n\nAvailable functions:\n" +
         describe_functions(registry.list_specs());
}

AgentTranscript run_agent(const std::string& patient_id, const std::string& prompt, const ToolRegistry& registry,
                          const Store& store, ModelBackend& backend, const AgentConfig& config) {
  if (prompt.empty()) throw std::invalid_argument("run_agent: empty prompt");
  AgentTranscript transcript;
  transcript.patient_id = patient_id;

  Conversation conversation(build_system_prompt(registry));
  transcript.messages.push_back(conversation.system());
  transcript.messages.push_back(conversation.append_user(prompt));
  prune_into(conversation, config, transcript);

  std::uint64_t next_call = 0;
  while (true) {
    if (transcript.turns >= config.turn_cap) {
      throw TurnLimitExceeded("no final answer after " + std::to_string(config.turn_cap) + " turns");
    }
    ++transcript.turns;
    ModelReply reply = complete_with_retry(backend, conversation, registry.list_specs(), config);

    if (auto* final_reply = std::get_if<FinalReply>(&reply)) {
      transcript.messages.push_back(conversation.append_assistant(final_reply->text));
      transcript.final_text = final_reply->text;
      return transcript;
    }

    auto& calls = std::get<ToolCallsReply>(reply);
    for (auto& call : calls.calls) {
      if (call.call_id.empty()) call.call_id = "call_" + std::to_string(next_call);
      ++next_call;
    }
    transcript.messages.push_back(conversation.append_assistant(calls.content, calls.calls));

    for (const auto& call : calls.calls) {
      ToolResult result;
      try {
        result = registry.dispatch(call, store);
      } catch (const Error& e) {
        result = error_result(call.call_id, e);
      }
      transcript.tool_call_log.push_back({call.name, call.args, result.records_count, result.status});
      transcript.messages.push_back(conversation.append_tool(std::move(result)));
      prune_into(conversation, config, transcript);
    }
  }
}

}  // namespace labelflow
