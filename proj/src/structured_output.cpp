#include "labelflow/structured_output.hpp"

#include <algorithm>
#include <cctype>

namespace labelflow {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Body of the last complete ``` fenced block, if any.
std::optional<std::string_view> last_fenced_block(std::string_view text) {
  std::optional<std::string_view> last;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    std::size_t line_end = text.find('\n', open + 3);
    if (line_end == std::string_view::npos) break;
    std::size_t close = text.find("```", line_end + 1);
    if (close == std::string_view::npos) break;
    last = text.substr(line_end + 1, close - line_end - 1);
    pos = close + 3;
  }
  return last;
}

// Last balanced top-level {...} group, skipping braces inside "strings".
std::optional<std::string_view> last_brace_group(std::string_view text) {
  std::optional<std::string_view> last;
  int depth = 0;
  std::size_t start = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth++ == 0) start = i;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) last = text.substr(start, i - start + 1);
    }
  }
  return last;
}

std::string normalize_quotes(std::string_view block) {
  std::string out;
  out.reserve(block.size());
  enum { normal, in_double, in_single } state = normal;
  for (std::size_t i = 0; i < block.size(); ++i) {
    char c = block[i];
    switch (state) {
      case normal:
        if (c == '"') state = in_double;
        if (c == '\'') {
          state = in_single;
          c = '"';
        }
        out += c;
        break;
      case in_double:
        out += c;
        if (c == '\\' && i + 1 < block.size()) {
          out += block[++i];
        } else if (c == '"') {
          state = normal;
        }
        break;
      case in_single:
        if (c == '\\' && i + 1 < block.size()) {
          char next = block[++i];
          if (next == '\'') {
            out += '\'';
          } else {
            out += '\\';
            out += next;
          }
        } else if (c == '"') {
          out += "\\\"";
        } else if (c == '\'') {
          out += '"';
          state = normal;
        } else {
          out += c;
        }
        break;
    }
  }
  return out;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(path + key + ": missing");
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path = "") {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaViolation(path + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<std::string> require_string_list(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaViolation(path + key + ": expected a list of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw SchemaViolation(path + key + ": expected a list of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::optional<long long> integer_of(const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    return std::nullopt;
  }
  if (v.is_string()) {
    std::string_view s = trim(v.get<std::string>());
    if (s.empty() || s.size() > 18) return std::nullopt;
    long long value = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      value = value * 10 + (c - '0');
    }
    return value;
  }
  return std::nullopt;
}

Tier1Label validate_tier1(const json& obj) {
  Tier1Label label;
  label.patient_id = require_string(obj, "patient_id");
  label.first_name = require_string(obj, "first_name");
  label.last_name = require_string(obj, "last_name");
  label.sex = require_string(obj, "sex");
  std::string sex = lower(trim(label.sex));
  if (sex != "male" && sex != "female") throw SchemaViolation("sex: expected male or female, got '" + label.sex + "'");
  label.race = require_string(obj, "race");
  label.ethnicity = require_string(obj, "ethnicity");
  const json& courses = require(obj, "delivered_courses", "");
  if (!courses.is_array()) throw SchemaViolation("delivered_courses: expected a list");
  for (std::size_t i = 0; i < courses.size(); ++i) {
    const json& c = courses[i];
    std::string path = "delivered_courses[" + std::to_string(i) + "].";
    if (!c.is_object()) throw SchemaViolation(path.substr(0, path.size() - 1) + ": expected an object");
    ReportedCourse course;
    course.course_id = require_string(c, "course_id", path);
    course.icd_codes = require_string_list(c, "icd_codes", path);
    course.delivered_plan_ids = require_string_list(c, "delivered_plan_ids", path);
    course.radiation_type = require_string(c, "radiation_type", path);
    std::string type = lower(trim(course.radiation_type));
    if (type != "proton" && type != "photon" && type != "electron") {
      throw SchemaViolation(path + "radiation_type: expected proton, photon or electron");
    }
    label.delivered_courses.push_back(std::move(course));
  }
  return label;
}

OrnLabel validate_orn(const json& obj) {
  OrnLabel label;
  auto stage = integer_of(require(obj, "stage", ""));
  if (!stage || *stage < 0 || *stage > 3) {
    throw SchemaViolation("stage: expected 0, 1, 2 or 3, got " + obj.at("stage").dump());
  }
  label.stage = static_cast<int>(*stage);
  const char* key = obj.contains("total number of records") ? "total number of records" : "total_records";
  auto total = integer_of(require(obj, key, ""));
  if (!total) throw SchemaViolation(std::string(key) + ": expected a non-negative integer");
  label.total_records = *total;
  return label;
}

RecurrenceLabel validate_recurrence(const json& obj) {
  std::string value = lower(trim(require_string(obj, "recurrence")));
  if (value == "yes") return {true};
  if (value == "no") return {false};
  throw SchemaViolation("recurrence: expected yes or no, got '" + obj.at("recurrence").get<std::string>() + "'");
}

}  // namespace

std::string_view to_string(TaskName t) {
  switch (t) {
    case TaskName::tier1_qa:
      return "tier1_qa";
    case TaskName::orn:
      return "orn";
    case TaskName::recurrence:
      return "recurrence";
  }
  return "tier1_qa";
}

std::optional<TaskName> parse_task_name(std::string_view text) {
  for (TaskName t : {TaskName::tier1_qa, TaskName::orn, TaskName::recurrence}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

json extract_structured(std::string_view final_text) {
  if (auto block = last_fenced_block(final_text)) {
    std::string_view body = trim(*block);
    if (body.size() >= 4 && body.substr(0, 2) == "{{" && body.substr(body.size() - 2) == "}}") {
      body = trim(body.substr(1, body.size() - 2));
    }
    std::string normalized = normalize_quotes(body);
    try {
      return json::parse(normalized);
    } catch (const json::parse_error& e) {
      throw UnparsableBlock(std::string("fenced block: ") + e.what());
    }
  }
  auto group = last_brace_group(final_text);
  if (!group) throw NoStructuredOutput("no fenced block or {...} object in model output");
  try {
    return json::parse(*group);
  } catch (const json::parse_error& e) {
    throw UnparsableBlock(std::string("brace group: ") + e.what());
  }
}

Label validate_output(const json& object, TaskName schema) {
  if (!object.is_object()) throw SchemaViolation("$: expected an object");
  switch (schema) {
    case TaskName::tier1_qa:
      return validate_tier1(object);
    case TaskName::orn:
      return validate_orn(object);
    case TaskName::recurrence:
      return validate_recurrence(object);
  }
  throw std::logic_error("unhandled schema");
}

json courses_to_json(const std::vector<ReportedCourse>& courses) {
  json out = json::array();
  for (const auto& c : courses) {
    out.push_back({{"course_id", c.course_id},
                   {"icd_codes", c.icd_codes},
                   {"delivered_plan_ids", c.delivered_plan_ids},
                   {"radiation_type", c.radiation_type}});
  }
  return out;
}

std::vector<ReportedCourse> courses_from_json(const json& courses) {
  json wrapper{{"patient_id", ""}, {"first_name", ""}, {"last_name", ""}, {"sex", "male"},
               {"race", ""},       {"ethnicity", ""},  {"delivered_courses", courses}};
  return validate_tier1(wrapper).delivered_courses;
}

}  // namespace labelflow
