#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "labelflow/ehr_store.hpp"
#include "labelflow/error.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(UnknownFunction);
LABELFLOW_DEFINE_ERROR(ArgumentValidation);

enum class ParamType { string, number, date, enumeration };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::string;
  bool required = false;
  std::vector<std::string> enum_values;  // non-empty iff type == enumeration
  std::string description;
};

struct FunctionSpec {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
};

struct ToolCall {
  std::string call_id;
  std::string name;
  nlohmann::json args = nlohmann::json::object();
};

enum class ToolStatus { ok, error };

std::string_view to_string(ToolStatus s);

struct ToolResult {
  std::string call_id;
  ToolStatus status = ToolStatus::ok;
  std::string body;
  std::size_t records_count = 0;
};

// Builds the error result the agent sees when a dispatch throws. The body
// starts with the error kind.
ToolResult error_result(const std::string& call_id, const Error& error);

inline constexpr std::string_view kNotConfiguredBody = "external integration not configured";

// Whitelisted function catalog. Immutable once built; dispatch is re-entrant.
class ToolRegistry {
 public:
  // Handlers receive arguments that already passed validation.
  using Handler = std::function<ToolResult(const ToolCall& call, const Store& store)>;

  ToolRegistry() = default;

  // Patient retrieval, basic math and the external-integration stubs.
  static ToolRegistry make_default();

  // Throws std::invalid_argument on a duplicate name or an enum param
  // without values.
  void add(FunctionSpec spec, Handler handler);

  const std::vector<FunctionSpec>& list_specs() const { return specs_; }
  const FunctionSpec* find(std::string_view name) const;

  // Throws ArgumentValidation describing the first offending argument.
  void validate(const FunctionSpec& spec, const nlohmann::json& args) const;

  // Throws UnknownFunction, ArgumentValidation, DivisionByZero or
  // UnknownPatient. Nothing executes unless validation passed.
  ToolResult dispatch(const ToolCall& call, const Store& store) const;

 private:
  std::vector<FunctionSpec> specs_;
  std::map<std::string, std::pair<std::size_t, Handler>, std::less<>> entries_;
};

// Human-readable function catalog used inside the agent's system prompt.
std::string describe_functions(const std::vector<FunctionSpec>& specs);

}  // namespace labelflow
