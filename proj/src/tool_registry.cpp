#include "labelflow/tool_registry.hpp"

#include <sstream>
#include <stdexcept>

#include "labelflow/decimal_math.hpp"

namespace labelflow {

using nlohmann::json;

namespace {

const std::vector<std::string> kNoteTypeValues{"radiology", "pathology", "surgery", "radiation_oncology",
                                               "ent",       "urology",   "other"};

ParamSpec patient_id_param() {
  return {"patient_id", ParamType::string, true, {}, "Patient identifier."};
}

ParamSpec date_minimum_param() {
  return {"date_minimum", ParamType::date, false, {}, "Only return records on or after this date (YYYY-MM-DD)."};
}

// JSON numbers are read through their shortest round-trip text so 0.1 stays 0.1.
std::optional<Rational> number_arg(const json& value) {
  if (value.is_number()) return parse_decimal(value.dump());
  if (value.is_string()) return parse_decimal(value.get<std::string>());
  return std::nullopt;
}

RetrievalFilter filter_from(const json& args) {
  RetrievalFilter filter;
  if (auto it = args.find("note_type"); it != args.end() && !it->is_null()) filter.note_type = parse_note_type(it->get<std::string>());
  if (auto it = args.find("date_minimum"); it != args.end() && !it->is_null()) filter.date_minimum = parse_date(it->get<std::string>());
  return filter;
}

ToolRegistry::Handler retrieval(RetrievalKind kind) {
  return [kind](const ToolCall& call, const Store& store) {
    auto result = store.retrieve(call.args.at("patient_id").get<std::string>(), kind, filter_from(call.args));
    return ToolResult{call.call_id, ToolStatus::ok, std::move(result.payload), result.records_count};
  };
}

ToolRegistry::Handler arithmetic(ArithmeticOp op) {
  return [op](const ToolCall& call, const Store&) {
    Rational value = apply(op, *number_arg(call.args.at("a")), *number_arg(call.args.at("b")));
    return ToolResult{call.call_id, ToolStatus::ok, render_decimal(value), 0};
  };
}

ToolRegistry::Handler not_configured() {
  return [](const ToolCall& call, const Store&) {
    return ToolResult{call.call_id, ToolStatus::error,
                      "NotConfigured: " + std::string(kNotConfiguredBody) + " (" + call.name + ")", 0};
  };
}

std::string_view type_name(ParamType t) {
  switch (t) {
    case ParamType::string:
      return "string";
    case ParamType::number:
      return "number";
    case ParamType::date:
      return "date";
    case ParamType::enumeration:
      return "enum";
  }
  return "string";
}

}  // namespace

std::string_view to_string(ToolStatus s) { return s == ToolStatus::ok ? "ok" : "error"; }

ToolResult error_result(const std::string& call_id, const Error& error) {
  return ToolResult{call_id, ToolStatus::error, error.what(), 0};
}

void ToolRegistry::add(FunctionSpec spec, Handler handler) {
  if (entries_.count(spec.name)) throw std::invalid_argument("duplicate function name: " + spec.name);
  for (const auto& p : spec.params) {
    if ((p.type == ParamType::enumeration) != !p.enum_values.empty()) {
      throw std::invalid_argument("enum values mismatch for " + spec.name + "." + p.name);
    }
  }
  entries_.emplace(spec.name, std::make_pair(specs_.size(), std::move(handler)));
  specs_.push_back(std::move(spec));
}

const FunctionSpec* ToolRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &specs_[it->second.first];
}

void ToolRegistry::validate(const FunctionSpec& spec, const json& args) const {
  if (!args.is_object()) throw ArgumentValidation(spec.name + ": arguments must be an object");
  for (const auto& [key, value] : args.items()) {
    bool known = false;
    for (const auto& p : spec.params) known = known || p.name == key;
    if (!known) throw ArgumentValidation(spec.name + ": unexpected argument '" + key + "'");
  }
  for (const auto& p : spec.params) {
    auto it = args.find(p.name);
    if (it == args.end() || it->is_null()) {
      if (p.required) throw ArgumentValidation(spec.name + ": missing required argument '" + p.name + "'");
      continue;
    }
    const std::string where = spec.name + "." + p.name;
    switch (p.type) {
      case ParamType::string:
        if (!it->is_string()) throw ArgumentValidation(where + ": expected a string");
        break;
      case ParamType::number:
        if (!number_arg(*it)) throw ArgumentValidation(where + ": expected a decimal number");
        break;
      case ParamType::date:
        if (!it->is_string() || !parse_date(it->get<std::string>())) {
          throw ArgumentValidation(where + ": expected a YYYY-MM-DD date");
        }
        break;
      case ParamType::enumeration: {
        bool ok = false;
        if (it->is_string()) {
          for (const auto& v : p.enum_values) ok = ok || v == it->get<std::string>();
        }
        if (!ok) throw ArgumentValidation(where + ": value not in allowed set");
        break;
      }
    }
  }
}

ToolResult ToolRegistry::dispatch(const ToolCall& call, const Store& store) const {
  auto it = entries_.find(call.name);
  if (it == entries_.end()) throw UnknownFunction("function '" + call.name + "' is not whitelisted");
  validate(specs_[it->second.first], call.args);
  ToolResult result = it->second.second(call, store);
  result.call_id = call.call_id;
  return result;
}

ToolRegistry ToolRegistry::make_default() {
  ToolRegistry r;

  r.add({"get_patient_details", "Demographics of the patient: name, sex, race and ethnicity.", {patient_id_param()}},
        retrieval(RetrievalKind::details));
  r.add({"get_patient_treatment_details",
         "Radiotherapy treatment courses with ICD codes and delivered plans (plan ID, radiation type, date).",
         {patient_id_param()}},
        retrieval(RetrievalKind::treatment_details));
  r.add({"get_patient_diagnosis_details", "Diagnoses with ICD code, description and onset date.", {patient_id_param()}},
        retrieval(RetrievalKind::diagnosis_details));
  r.add({"get_patient_clinical_notes",
         "Clinical notes, newest first, optionally filtered by note type and minimum date.",
         {patient_id_param(),
          {"note_type", ParamType::enumeration, false, kNoteTypeValues, "Specialty of the note."},
          date_minimum_param()}},
        retrieval(RetrievalKind::clinical_notes));
  r.add({"get_patient_radiology_reports", "Radiology reports, newest first.", {patient_id_param(), date_minimum_param()}},
        retrieval(RetrievalKind::radiology_reports));
  r.add({"get_patient_pathology_reports", "Pathology reports, newest first.", {patient_id_param(), date_minimum_param()}},
        retrieval(RetrievalKind::pathology_reports));
  r.add({"get_patient_inbasket_messages", "In-basket messages, newest first.", {patient_id_param(), date_minimum_param()}},
        retrieval(RetrievalKind::inbasket_messages));
  r.add({"get_patient_appointments", "Appointments, newest first.", {patient_id_param(), date_minimum_param()}},
        retrieval(RetrievalKind::appointments));
  r.add({"get_physician_appointments",
         "Appointments scheduled with one physician, newest first.",
         {{"provider", ParamType::string, true, {}, "Physician name as it appears on appointments."},
          date_minimum_param()}},
        [](const ToolCall& call, const Store& store) {
          std::optional<Date> minimum;
          if (auto it = call.args.find("date_minimum"); it != call.args.end() && !it->is_null()) {
            minimum = parse_date(it->get<std::string>());
          }
          auto result = store.physician_appointments(call.args.at("provider").get<std::string>(), minimum);
          return ToolResult{call.call_id, ToolStatus::ok, std::move(result.payload), result.records_count};
        });

  const std::vector<ParamSpec> operands{{"a", ParamType::number, true, {}, "First operand."},
                                        {"b", ParamType::number, true, {}, "Second operand."}};
  r.add({"add", "Returns a + b.", operands}, arithmetic(ArithmeticOp::add));
  r.add({"subtract", "Returns a - b.", operands}, arithmetic(ArithmeticOp::subtract));
  r.add({"multiply", "Returns a * b.", operands}, arithmetic(ArithmeticOp::multiply));
  r.add({"divide", "Returns a / b.", operands}, arithmetic(ArithmeticOp::divide));

  auto text = [](const char* name, const char* description) {
    return ParamSpec{name, ParamType::string, true, {}, description};
  };
  r.add({"get_list_of_clinical_trials", "Recruiting trials from clinicaltrials.gov.", {text("condition", "Condition.")}},
        not_configured());
  r.add({"get_eligibility_criteria", "Eligibility criteria for one trial.", {text("nct_id", "Trial NCT number.")}},
        not_configured());
  r.add({"get_patient_population", "Cohort-level population statistics.", {text("query", "Population query.")}},
        not_configured());
  r.add({"get_pstar_data",
         "Proton stopping power, CSDA and projected range for a material.",
         {text("material", "PSTAR material name."), {"energy_mev", ParamType::number, true, {}, "Kinetic energy."}}},
        not_configured());
  r.add({"get_pstar_material_list", "Materials known to PSTAR.", {}}, not_configured());
  r.add({"pubmed_search", "Search PubMed.", {text("query", "Search terms.")}}, not_configured());
  r.add({"pubmed_summary", "Summary of one PubMed article.", {text("pmid", "PubMed ID.")}}, not_configured());
  r.add({"pubmed_fetch", "Abstract of one PubMed article.", {text("pmid", "PubMed ID.")}}, not_configured());
  r.add({"send_dicoms_to_server",
         "Send a patient's DICOM objects to a server.",
         {patient_id_param(), text("destination", "DICOM destination AE title.")}},
        not_configured());
  r.add({"get_dicom_streams_info", "Active DICOM streams.", {}}, not_configured());
  r.add({"clear_dicom_streams_logs", "Clear DICOM stream logs.", {}}, not_configured());
  r.add({"get_radiation_therapy_ae_codes", "Radiation-therapy adverse event codes.", {}}, not_configured());
  r.add({"get_ctcae_details_by_ae_code", "CTCAE grading details for one adverse event code.",
         {text("ae_code", "CTCAE code.")}},
        not_configured());
  return r;
}

std::string describe_functions(const std::vector<FunctionSpec>& specs) {
  std::ostringstream out;
  for (const auto& spec : specs) {
    out << "- " << spec.name << "(";
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      const auto& p = spec.params[i];
      if (i) out << ", ";
      out << p.name << ": " << type_name(p.type) << (p.required ? "" : " (optional)");
      if (!p.enum_values.empty()) {
        out << " one of {";
        for (std::size_t k = 0; k < p.enum_values.size(); ++k) out << (k ? ", " : "") << p.enum_values[k];
        out << "}";
      }
    }
    out << "): " << spec.description << "\n";
  }
  return out.str();
}

}  // namespace labelflow
