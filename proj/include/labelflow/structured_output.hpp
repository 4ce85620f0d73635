#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "labelflow/error.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(NoStructuredOutput);
LABELFLOW_DEFINE_ERROR(UnparsableBlock);
LABELFLOW_DEFINE_ERROR(SchemaViolation);

// Output schemas, one per task prompt.
enum class TaskName { tier1_qa, orn, recurrence };

std::string_view to_string(TaskName t);
std::optional<TaskName> parse_task_name(std::string_view text);

// Pulls the answer object out of a model's final message. The last fenced
// code block wins; inside it single-quoted strings and doubled outer braces
// are normalized. Without a fence the last balanced top-level {...} group is
// parsed strictly.
nlohmann::json extract_structured(std::string_view final_text);

struct ReportedCourse {
  std::string course_id;
  std::vector<std::string> icd_codes;
  std::vector<std::string> delivered_plan_ids;
  std::string radiation_type;
};

struct Tier1Label {
  std::string patient_id;
  std::string first_name;
  std::string last_name;
  std::string sex;
  std::string race;
  std::string ethnicity;
  std::vector<ReportedCourse> delivered_courses;
};

struct OrnLabel {
  int stage = 0;  // Marx stage, 0 meaning no ORN
  long long total_records = 0;
};

struct RecurrenceLabel {
  bool recurrence = false;
};

using Label = std::variant<Tier1Label, OrnLabel, RecurrenceLabel>;

// Throws SchemaViolation naming the offending field.
Label validate_output(const nlohmann::json& object, TaskName schema);

nlohmann::json courses_to_json(const std::vector<ReportedCourse>& courses);
std::vector<ReportedCourse> courses_from_json(const nlohmann::json& courses);

}  // namespace labelflow
