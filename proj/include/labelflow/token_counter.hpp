#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace labelflow {

// Whitespace-delimited word count.
std::size_t count_words(std::string_view text);

// Pluggable tokenizer contract. Implementations must be deterministic and
// monotone under concatenation.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t count(std::string_view text) const = 0;

  // Counters that depend only on the word count may answer here, letting the
  // pruner skip rescanning text after each pass.
  virtual std::optional<std::size_t> tokens_for_words(std::size_t /*words*/) const { return std::nullopt; }
};

// One token per word; used where exact arithmetic matters.
class WordCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view text) const override { return count_words(text); }
  std::optional<std::size_t> tokens_for_words(std::size_t words) const override { return words; }
};

// ceil(words * 4 / 3), the default when no real tokenizer is configured.
class HeuristicCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view text) const override { return *tokens_for_words(count_words(text)); }
  std::optional<std::size_t> tokens_for_words(std::size_t words) const override { return (words * 4 + 2) / 3; }
};

inline std::size_t count_tokens(std::string_view text, const TokenCounter& counter) { return counter.count(text); }

}  // namespace labelflow
