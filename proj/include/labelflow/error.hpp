#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace labelflow {

// Base of every domain error. kind() is the stable error name that shows up
// in tool results, HTTP payloads and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LABELFLOW_DEFINE_ERROR(Name)                                        \
  class Name : public ::labelflow::Error {                                  \
   public:                                                                  \
    explicit Name(const std::string& message) : Error(#Name, message) {}    \
  }

// Bad command-line usage and incomplete configuration, shared by the CLI and
// the backends.
LABELFLOW_DEFINE_ERROR(UsageError);
LABELFLOW_DEFINE_ERROR(ConfigError);

}  // namespace labelflow
