#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "labelflow/conversation.hpp"
#include "labelflow/error.hpp"
#include "labelflow/token_counter.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(ContextInfeasible);

struct PrunerConfig {
  std::size_t max_history_tokens = 95'000;
  std::size_t words_per_pass = 250;
  std::size_t min_threshold_tokens = 10'000;
  std::size_t threshold_decrement_tokens = 2'500;

  // Throws std::invalid_argument unless all values are positive and
  // min_threshold_tokens < max_history_tokens.
  void validate() const;
};

struct PrunePass {
  std::size_t message_index = 0;
  long long threshold = 0;
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
};

struct PruneReport {
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
  std::vector<PrunePass> passes;
};

// Total tokens over every message, system prompt included.
std::size_t conversation_tokens(const Conversation& conversation, const TokenCounter& counter);

// `text` with its last `words` whitespace-delimited words (and the whitespace
// before them) removed. The result is always a prefix of `text`.
std::string_view drop_trailing_words(std::string_view text, std::size_t words);

// Shrinks the conversation to max_history_tokens by cutting word batches from
// the tails of the oldest non-system messages. Messages at or below the
// current threshold are skipped; once every message is at or below it the
// threshold steps down, and at zero messages are emptied oldest first. The
// system message is never touched.
//
// Throws ContextInfeasible when the system message plus the newest message
// alone exceed the budget.
Conversation prune_context(Conversation conversation, const PrunerConfig& config, const TokenCounter& counter,
                           PruneReport* report = nullptr);

}  // namespace labelflow
