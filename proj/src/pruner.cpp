#include "labelflow/pruner.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace labelflow {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

void PrunerConfig::validate() const {
  if (max_history_tokens == 0 || words_per_pass == 0 || min_threshold_tokens == 0 || threshold_decrement_tokens == 0) {
    throw std::invalid_argument("pruner parameters must be positive");
  }
  if (min_threshold_tokens >= max_history_tokens) {
    throw std::invalid_argument("min_threshold_tokens must be below max_history_tokens");
  }
}

std::size_t conversation_tokens(const Conversation& conversation, const TokenCounter& counter) {
  std::size_t total = 0;
  for (const auto& m : conversation.messages()) total += counter.count(m.content);
  return total;
}

std::string_view drop_trailing_words(std::string_view text, std::size_t words) {
  std::size_t end = text.size();
  for (std::size_t i = 0; i < words && end > 0; ++i) {
    while (end > 0 && is_space(text[end - 1])) --end;
    while (end > 0 && !is_space(text[end - 1])) --end;
  }
  while (end > 0 && is_space(text[end - 1])) --end;
  return text.substr(0, end);
}

Conversation prune_context(Conversation conversation, const PrunerConfig& config, const TokenCounter& counter,
                           PruneReport* report) {
  config.validate();
  const auto& msgs = conversation.messages();
  const std::size_t n = msgs.size();
  const bool word_based = counter.tokens_for_words(0).has_value();

  std::vector<std::size_t> tokens(n);
  std::vector<std::size_t> words(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (word_based) {
      words[i] = count_words(msgs[i].content);
      tokens[i] = *counter.tokens_for_words(words[i]);
    } else {
      tokens[i] = counter.count(msgs[i].content);
    }
    total += tokens[i];
  }
  if (report) {
    report->tokens_before = total;
    report->tokens_after = total;
    report->passes.clear();
  }
  const std::size_t max = config.max_history_tokens;
  if (total <= max) return conversation;

  const std::size_t newest = n - 1;
  if (n < 2 || tokens[0] + tokens[newest] > max) {
    throw ContextInfeasible("system prompt plus newest message need " +
                            std::to_string(tokens[0] + (n < 2 ? 0 : tokens[newest])) + " tokens, budget is " +
                            std::to_string(max));
  }

  long long threshold = static_cast<long long>(config.min_threshold_tokens);
  while (true) {
    const std::size_t floor = threshold > 0 ? static_cast<std::size_t>(threshold) : 0;
    for (std::size_t i = 1; i < n && total > max; ++i) {
      while (tokens[i] > floor && total > max) {
        const std::string& content = msgs[i].content;
        std::string_view kept = drop_trailing_words(content, config.words_per_pass);
        if (kept.size() == content.size()) break;  // nothing left to cut
        std::size_t new_tokens;
        if (word_based) {
          words[i] -= std::min(words[i], config.words_per_pass);
          new_tokens = *counter.tokens_for_words(words[i]);
        } else {
          new_tokens = counter.count(kept);
        }
        conversation.set_content(i, std::string(kept));
        if (report) report->passes.push_back({i, threshold, tokens[i], new_tokens});
        total = total - tokens[i] + new_tokens;
        tokens[i] = new_tokens;
      }
    }
    if (total <= max) break;
    if (threshold <= 0) {
      throw ContextInfeasible("conversation still needs " + std::to_string(total) + " tokens after emptying history");
    }
    threshold -= static_cast<long long>(config.threshold_decrement_tokens);
  }
  if (report) report->tokens_after = total;
  return conversation;
}

}  // namespace labelflow
