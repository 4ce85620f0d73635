#include "labelflow/scripted_backend.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <thread>

#include "labelflow/dates.hpp"

namespace labelflow {

using nlohmann::json;

namespace {

ToolCall call(std::size_t turn, std::size_t k, std::string name, json args) {
  return ToolCall{"t" + std::to_string(turn) + "_" + std::to_string(k), std::move(name), std::move(args)};
}

bool head_and_neck_code(const std::string& icd) {
  if (icd.size() < 3 || icd[0] != 'C') return false;
  const int group = (icd[1] - '0') * 10 + (icd[2] - '0');
  return group <= 14 || (group >= 30 && group <= 32);
}

std::string fenced(const std::string& info, const std::string& body) { return "```" + info + "\n" + body + "\n```"; }

}  // namespace

ScriptedBackend::ScriptedBackend(TruthManifest manifest, const Store& store, TaskName task, ScriptBehavior behavior)
    : manifest_(std::move(manifest)), store_(store), task_(task), behavior_(std::move(behavior)) {}

const ManifestEntry& ScriptedBackend::patient_of(const Conversation& conversation) const {
  for (const auto& m : conversation.messages()) {
    if (m.role != Role::user) continue;
    const std::string& text = m.content;
    std::size_t i = 0;
    while (i < text.size()) {
      if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      if (const ManifestEntry* e = manifest_.find(std::string_view(text).substr(i, j - i))) return *e;
      i = j;
    }
  }
  throw UnknownPatientInScript("no manifest patient named in the conversation");
}

ModelReply ScriptedBackend::complete(const Conversation& conversation, const std::vector<FunctionSpec>&) {
  if (behavior_.latency_per_call.count() > 0) std::this_thread::sleep_for(behavior_.latency_per_call);
  const ManifestEntry& entry = patient_of(conversation);
  std::size_t turn = 0;
  for (const auto& m : conversation.messages()) turn += m.role == Role::assistant;
  switch (task_) {
    case TaskName::tier1_qa:
      return tier1(entry, turn);
    case TaskName::orn:
      return orn(entry, turn, conversation);
    case TaskName::recurrence:
      return recurrence(entry, turn);
  }
  throw BackendFailure("unsupported task", false);
}

ModelReply ScriptedBackend::tier1(const ManifestEntry& entry, std::size_t turn) const {
  const json pid{{"patient_id", entry.patient_id}};
  if (turn == 0) return ToolCallsReply{{call(turn, 0, "get_patient_details", pid)}, ""};
  if (turn == 1) return ToolCallsReply{{call(turn, 0, "get_patient_treatment_details", pid)}, ""};

  const PatientRecord& r = store_.patient(entry.patient_id);
  if (behavior_.prose_patients.count(entry.patient_id)) {
    return FinalReply{"Patient " + r.demographics.first_name + " " + r.demographics.last_name + " received " +
                      std::to_string(r.courses.size()) + " radiotherapy courses."};
  }
  json courses = json::array();
  bool truncated = false;
  for (const auto& c : r.courses) {
    std::string course_id = c.course_id;
    if (entry.truncated_course && !truncated && !course_id.empty() &&
        std::isdigit(static_cast<unsigned char>(course_id.front()))) {
      course_id = strip_leading_digits(course_id);
      truncated = true;
    }
    json plans = json::array();
    for (const auto& p : c.delivered_plans) plans.push_back(p.plan_id);
    courses.push_back({{"course_id", course_id},
                       {"icd_codes", c.icd_codes},
                       {"delivered_plan_ids", plans},
                       {"radiation_type", c.delivered_plans.empty()
                                              ? "photon"
                                              : std::string(to_string(c.delivered_plans.front().radiation_type))}});
  }
  json answer{{"patient_id", r.demographics.patient_id},
              {"first_name", r.demographics.first_name},
              {"last_name", r.demographics.last_name},
              {"sex", to_string(r.demographics.sex)},
              {"race", r.demographics.race},
              {"ethnicity", r.demographics.ethnicity},
              {"delivered_courses", courses}};
  return FinalReply{"Here are the requested details:\n\n" + fenced("", answer.dump(4))};
}

ModelReply ScriptedBackend::orn(const ManifestEntry& entry, std::size_t turn, const Conversation& conversation) const {
  const json pid{{"patient_id", entry.patient_id}};
  switch (turn) {
    case 0:
      return ToolCallsReply{{call(turn, 0, "get_patient_details", pid), call(turn, 1, "get_patient_diagnosis_details", pid),
                             call(turn, 2, "get_patient_treatment_details", pid)},
                            "Retrieving structured data first."};
    case 1:
      return ToolCallsReply{{call(turn, 0, "get_patient_radiology_reports", pid),
                             call(turn, 1, "get_patient_pathology_reports", pid)},
                            ""};
    case 2: {
      std::vector<ToolCall> calls;
      for (const char* type : {"radiology", "pathology", "surgery", "radiation_oncology", "ent"}) {
        calls.push_back(call(turn, calls.size(), "get_patient_clinical_notes",
                             {{"patient_id", entry.patient_id}, {"note_type", type}}));
      }
      return ToolCallsReply{std::move(calls), ""};
    }
    default:
      break;
  }

  std::map<std::string, std::string> names;
  for (const auto& m : conversation.messages()) {
    for (const auto& c : m.tool_calls) names[c.call_id] = c.name;
  }
  std::size_t total = 0;
  for (const auto& m : conversation.messages()) {
    if (!m.tool_result || m.tool_result->status != ToolStatus::ok) continue;
    const std::string& name = names[m.tool_result->call_id];
    if (name == "get_patient_details" || name == "get_patient_diagnosis_details" ||
        name == "get_patient_treatment_details") {
      continue;
    }
    total += m.tool_result->records_count;
  }

  const bool positive = entry.predicted_label();
  const int stage = positive ? (entry.true_label && entry.true_stage ? *entry.true_stage : 1) : 0;
  std::ostringstream text;
  text << "## Patient History\nRetrieved structured data, reports and clinical notes for " << entry.patient_id
       << ".\n\n## Data Quantity\nTotal number of records retrieved: " << total << ".\n\n## Marx Staging\n"
       << (stage == 0 ? "No criteria for stage 1, 2 or 3 are met." : "Criteria for stage " + std::to_string(stage) + " are met.")
       << "\n\n## Concluding Remarks\n"
       << (positive ? "The record supports osteoradionecrosis." : "The record does not support osteoradionecrosis.")
       << "\n";
  if (behavior_.prose_patients.count(entry.patient_id)) return FinalReply{text.str()};
  text << "\n" << fenced("", "{\n    'stage': '" + std::to_string(stage) + "', \n    'total number of records': '" +
                                 std::to_string(total) + "'\n}");
  return FinalReply{text.str()};
}

ModelReply ScriptedBackend::recurrence(const ManifestEntry& entry, std::size_t turn) const {
  const json pid{{"patient_id", entry.patient_id}};
  if (turn == 0) {
    return ToolCallsReply{{call(turn, 0, "get_patient_treatment_details", pid),
                           call(turn, 1, "get_patient_diagnosis_details", pid)},
                          "Retrieving treatment details and diagnoses first."};
  }
  const PatientRecord& r = store_.patient(entry.patient_id);
  if (turn == 1) {
    std::optional<std::string> date_minimum;
    const TreatmentCourse* first = nullptr;
    for (const auto& c : r.courses) {
      if (c.delivered_plans.empty()) continue;
      if (!first || c.delivered_plans.front().delivered_date < first->delivered_plans.front().delivered_date) first = &c;
    }
    if (first) date_minimum = format_date(first->last_treatment_date);
    bool urology = false, ent = false;
    for (const auto& d : r.diagnoses) {
      urology = urology || d.icd_code.rfind("C61", 0) == 0;
      ent = ent || head_and_neck_code(d.icd_code);
    }
    auto args = [&](std::optional<std::string> note_type) {
      json a = pid;
      if (note_type) a["note_type"] = *note_type;
      if (date_minimum) a["date_minimum"] = *date_minimum;
      return a;
    };
    std::vector<ToolCall> calls;
    for (const char* type : {"radiation_oncology", "pathology", "radiology"}) {
      calls.push_back(call(turn, calls.size(), "get_patient_clinical_notes", args(type)));
    }
    if (urology) calls.push_back(call(turn, calls.size(), "get_patient_clinical_notes", args("urology")));
    if (ent) calls.push_back(call(turn, calls.size(), "get_patient_clinical_notes", args("ent")));
    calls.push_back(call(turn, calls.size(), "get_patient_radiology_reports", args(std::nullopt)));
    std::string remark = date_minimum ? "The first course ended on " + *date_minimum + "." : "No treatment details.";
    return ToolCallsReply{std::move(calls), remark};
  }

  const bool positive = entry.predicted_label();
  std::ostringstream text;
  text << "## Summary of Retrieved Data\nNotes and reports after treatment were reviewed.\n\n"
       << "## Concluding Remarks\n"
       << (positive ? "The evidence supports cancer recurrence." : "The evidence does not support cancer recurrence.")
       << "\n";
  if (behavior_.prose_patients.count(entry.patient_id)) return FinalReply{text.str()};
  text << "\n## Answer\n" << fenced("json", std::string("{\n    \"recurrence\": \"") + (positive ? "yes" : "no") + "\"\n}");
  return FinalReply{text.str()};
}

}  // namespace labelflow
