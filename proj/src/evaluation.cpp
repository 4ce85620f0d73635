#include "labelflow/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "labelflow/csv.hpp"

namespace labelflow {

using nlohmann::json;

namespace {

std::string trim_lower(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  std::string out(text.substr(begin, end - begin + 1));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join_set(const std::set<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    out += v;
  }
  return out;
}

std::string course_path(const std::string& course_id, std::string_view field = {}) {
  std::string path = "course[" + course_id + "]";
  if (!field.empty()) path += "." + std::string(field);
  return path;
}

bool is_course_diff(const Tier1Diff& d) { return d.field_path.rfind("demographics.", 0) != 0; }

std::string case_key(const std::string& patient_id, Tier2Task task) {
  return patient_id + '\x1f' + std::string(to_string(task));
}

json optional_tenths(const std::optional<Tenths>& v) { return v ? json(format_tenths(*v)) : json(nullptr); }

}  // namespace

// ---- Tier 1 ---------------------------------------------------------------

std::string_view to_string(DiffKind k) {
  switch (k) {
    case DiffKind::value_mismatch:
      return "value_mismatch";
    case DiffKind::missing_course:
      return "missing_course";
    case DiffKind::extra_course:
      return "extra_course";
    case DiffKind::count_mismatch:
      return "count_mismatch";
  }
  return "value_mismatch";
}

std::vector<Tier1Diff> compare_tier1(const PatientRecord& expected, const Tier1Label& actual) {
  std::vector<Tier1Diff> diffs;
  const Demographics& d = expected.demographics;
  const std::string& pid = d.patient_id;

  if (d.patient_id != actual.patient_id) {
    diffs.push_back({pid, "demographics.patient_id", d.patient_id, actual.patient_id, DiffKind::value_mismatch});
  }
  const std::pair<const char*, std::pair<std::string, std::string>> folded[] = {
      {"first_name", {d.first_name, actual.first_name}},
      {"last_name", {d.last_name, actual.last_name}},
      {"sex", {std::string(to_string(d.sex)), actual.sex}},
      {"race", {d.race, actual.race}},
      {"ethnicity", {d.ethnicity, actual.ethnicity}},
  };
  for (const auto& [field, values] : folded) {
    if (trim_lower(values.first) != trim_lower(values.second)) {
      diffs.push_back({pid, std::string("demographics.") + field, values.first, values.second, DiffKind::value_mismatch});
    }
  }

  std::map<std::string, const TreatmentCourse*> stored;
  for (const auto& c : expected.courses) stored.emplace(c.course_id, &c);
  std::map<std::string, const ReportedCourse*> reported;
  std::set<std::string> duplicates;
  for (const auto& c : actual.delivered_courses) {
    if (!reported.emplace(c.course_id, &c).second) duplicates.insert(c.course_id);
  }

  if (expected.courses.size() != actual.delivered_courses.size()) {
    diffs.push_back({pid, "courses.count", std::to_string(expected.courses.size()),
                     std::to_string(actual.delivered_courses.size()), DiffKind::count_mismatch});
  }
  for (const auto& [id, course] : stored) {
    auto it = reported.find(id);
    if (it == reported.end()) {
      diffs.push_back({pid, course_path(id), id, "", DiffKind::missing_course});
      continue;
    }
    const ReportedCourse& got = *it->second;
    std::set<std::string> icd_expected(course->icd_codes.begin(), course->icd_codes.end());
    std::set<std::string> icd_actual(got.icd_codes.begin(), got.icd_codes.end());
    if (icd_expected != icd_actual) {
      diffs.push_back({pid, course_path(id, "icd_codes"), join_set(icd_expected), join_set(icd_actual),
                       DiffKind::value_mismatch});
    }
    std::set<std::string> plans_expected, types_expected;
    for (const auto& p : course->delivered_plans) {
      plans_expected.insert(p.plan_id);
      types_expected.insert(std::string(to_string(p.radiation_type)));
    }
    std::set<std::string> plans_actual(got.delivered_plan_ids.begin(), got.delivered_plan_ids.end());
    if (plans_expected != plans_actual) {
      diffs.push_back({pid, course_path(id, "delivered_plan_ids"), join_set(plans_expected), join_set(plans_actual),
                       DiffKind::value_mismatch});
    }
    if (!types_expected.count(got.radiation_type)) {
      diffs.push_back({pid, course_path(id, "radiation_type"), join_set(types_expected), got.radiation_type,
                       DiffKind::value_mismatch});
    }
  }
  for (const auto& [id, course] : reported) {
    if (!stored.count(id)) diffs.push_back({pid, course_path(id), "", id, DiffKind::extra_course});
  }
  for (const auto& id : duplicates) diffs.push_back({pid, course_path(id), "", id, DiffKind::extra_course});
  return diffs;
}

std::size_t demographic_mismatches(const std::vector<Tier1Diff>& diffs) {
  return static_cast<std::size_t>(std::count_if(diffs.begin(), diffs.end(), [](const auto& d) { return !is_course_diff(d); }));
}

bool treatment_matches(const std::vector<Tier1Diff>& diffs) {
  return std::none_of(diffs.begin(), diffs.end(), is_course_diff);
}

Tier1Summary evaluate_tier1(const Store& store, const std::vector<TaskResult>& results) {
  Tier1Summary summary;
  for (const auto& r : results) {
    const PatientRecord& record = store.patient(r.patient_id);
    ++summary.patients;
    summary.demographic_fields_total += kDemographicFieldCount;
    const Tier1Label* label = r.label ? std::get_if<Tier1Label>(&*r.label) : nullptr;
    if (r.status != TaskStatus::ok || !label) {
      ++summary.unscored;
      continue;
    }
    auto diffs = compare_tier1(record, *label);
    summary.demographic_fields_matched += kDemographicFieldCount - demographic_mismatches(diffs);
    if (treatment_matches(diffs)) ++summary.treatment_matches;
    for (auto& d : diffs) summary.diffs.push_back(std::move(d));
  }
  return summary;
}

std::string tier1_summary_text(const Tier1Summary& s) {
  std::ostringstream out;
  out << s.demographic_fields_matched << "/" << s.demographic_fields_total << " demographic fields matched\n";
  out << s.treatment_matches << "/" << s.patients << " treatment matches";
  if (s.patients > 0) {
    out << " (" << format_tenths(percent_tenths(static_cast<long long>(s.treatment_matches),
                                                static_cast<long long>(s.patients)))
        << "%)";
  }
  out << "\n";
  if (s.unscored) out << s.unscored << " rows without a valid answer\n";
  return out.str();
}

json to_json(const Tier1Summary& s) {
  json diffs = json::array();
  for (const auto& d : s.diffs) {
    diffs.push_back({{"patient_id", d.patient_id},
                     {"field_path", d.field_path},
                     {"expected", d.expected},
                     {"actual", d.actual},
                     {"kind", to_string(d.kind)}});
  }
  return {{"patients", s.patients},
          {"demographic_fields_matched", s.demographic_fields_matched},
          {"demographic_fields_total", s.demographic_fields_total},
          {"treatment_matches", s.treatment_matches},
          {"unscored", s.unscored},
          {"diffs", diffs}};
}

// ---- Tier 2 ---------------------------------------------------------------

std::string_view to_string(Tier2Task t) {
  switch (t) {
    case Tier2Task::orn:
      return "orn";
    case Tier2Task::prostate_recurrence:
      return "prostate_recurrence";
    case Tier2Task::hn_recurrence:
      return "hn_recurrence";
  }
  return "orn";
}

std::optional<Tier2Task> parse_tier2_task(std::string_view text) {
  for (Tier2Task t : {Tier2Task::orn, Tier2Task::prostate_recurrence, Tier2Task::hn_recurrence}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

TaskName schema_of(Tier2Task t) { return t == Tier2Task::orn ? TaskName::orn : TaskName::recurrence; }

bool positive_of(const Label& label, Tier2Task task) {
  if (task == Tier2Task::orn) {
    if (const auto* o = std::get_if<OrnLabel>(&label)) return o->stage >= 1;
  } else if (const auto* r = std::get_if<RecurrenceLabel>(&label)) {
    return r->recurrence;
  }
  throw std::invalid_argument("label does not match task " + std::string(to_string(task)));
}

LabeledCase LabeledCase::make(std::string patient_id, Tier2Task task, bool prediction, bool baseline_truth) {
  return LabeledCase{std::move(patient_id), task, prediction, baseline_truth, baseline_truth};
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

ConfusionMatrix confusion(const std::vector<LabeledCase>& cases) {
  ConfusionMatrix cm;
  for (const auto& c : cases) {
    if (c.excluded()) continue;
    const bool truth = *c.adjudicated_truth;
    if (c.prediction && truth) ++cm.tp;
    else if (c.prediction) ++cm.fp;
    else if (truth) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Tenths percent_tenths(long long num, long long den) {
  if (den <= 0) throw std::invalid_argument("percent_tenths: denominator must be positive");
  return (2000 * num + den) / (2 * den);
}

std::string format_tenths(Tenths value) {
  std::string sign = value < 0 ? "-" : "";
  const long long magnitude = value < 0 ? -value : value;
  return sign + std::to_string(magnitude / 10) + "." + std::to_string(magnitude % 10);
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport m;
  if (cm.tp + cm.fp > 0) m.precision = percent_tenths(cm.tp, cm.tp + cm.fp);
  if (cm.tp + cm.fn > 0) m.recall = percent_tenths(cm.tp, cm.tp + cm.fn);
  if (m.precision && m.recall) m.f1 = percent_tenths(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  if (cm.n() > 0) m.accuracy = percent_tenths(cm.tp + cm.tn, cm.n());
  return m;
}

ConfusionMatrix micro_average(const std::vector<ConfusionMatrix>& matrices) {
  if (matrices.empty()) throw std::invalid_argument("micro_average needs at least one matrix");
  ConfusionMatrix total;
  for (const auto& cm : matrices) total += cm;
  return total;
}

std::vector<LabeledCase> list_discrepancies(const std::vector<LabeledCase>& cases) {
  std::vector<LabeledCase> out;
  std::copy_if(cases.begin(), cases.end(), std::back_inserter(out), [](const auto& c) { return c.discordant(); });
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.patient_id, a.task) < std::tie(b.patient_id, b.task);
  });
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ground_truth_error:
      return "ground_truth_error";
    case Verdict::model_error:
      return "model_error";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "model_error";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (Verdict v : {Verdict::ground_truth_error, Verdict::model_error, Verdict::indeterminate}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

std::vector<LabeledCase> apply_adjudication(std::vector<LabeledCase> cases,
                                            const std::vector<AdjudicationVerdict>& verdicts) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cases.size(); ++i) index.emplace(case_key(cases[i].patient_id, cases[i].task), i);
  std::set<std::string> seen;
  for (const auto& v : verdicts) {
    const std::string key = case_key(v.patient_id, v.task);
    auto it = index.find(key);
    const std::string which = v.patient_id + " (" + std::string(to_string(v.task)) + ")";
    if (it == index.end()) throw UnknownCase("no case " + which);
    LabeledCase& c = cases[it->second];
    if (!c.discordant()) throw VerdictForConcordantCase("case " + which + " agrees with its baseline label");
    if (!seen.insert(key).second) throw DuplicateVerdict("case " + which + " already has a verdict");
    switch (v.verdict) {
      case Verdict::ground_truth_error:
        c.adjudicated_truth = !c.baseline_truth;
        break;
      case Verdict::model_error:
        c.adjudicated_truth = c.baseline_truth;
        break;
      case Verdict::indeterminate:
        c.adjudicated_truth.reset();
        break;
    }
  }
  return cases;
}

json to_json(const VerdictRecord& r) {
  return {{"seq", r.seq},
          {"patient_id", r.verdict.patient_id},
          {"task", to_string(r.verdict.task)},
          {"verdict", to_string(r.verdict.verdict)},
          {"note", r.verdict.note},
          {"reviewer", r.verdict.reviewer},
          {"decided_at", r.verdict.decided_at},
          {"supersede", r.supersede}};
}

VerdictRecord verdict_record_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("verdict must be an object");
  auto text = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw std::invalid_argument(std::string("missing field '") + key + "'");
      return {};
    }
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  VerdictRecord r;
  if (auto it = j.find("seq"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw std::invalid_argument("field 'seq' must be a non-negative integer");
    r.seq = it->get<std::uint64_t>();
  }
  r.verdict.patient_id = text("patient_id", true);
  if (r.verdict.patient_id.empty()) throw std::invalid_argument("field 'patient_id' must not be empty");
  const std::string task = text("task", true);
  auto parsed_task = parse_tier2_task(task);
  if (!parsed_task) throw std::invalid_argument("unknown task '" + task + "'");
  r.verdict.task = *parsed_task;
  const std::string verdict = text("verdict", true);
  auto parsed_verdict = parse_verdict(verdict);
  if (!parsed_verdict) throw std::invalid_argument("unknown verdict '" + verdict + "'");
  r.verdict.verdict = *parsed_verdict;
  r.verdict.note = text("note", false);
  r.verdict.reviewer = text("reviewer", false);
  r.verdict.decided_at = text("decided_at", false);
  if (auto it = j.find("supersede"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw std::invalid_argument("field 'supersede' must be a boolean");
    r.supersede = it->get<bool>();
  }
  return r;
}

std::vector<AdjudicationVerdict> active_verdicts(const std::vector<VerdictRecord>& log) {
  std::vector<AdjudicationVerdict> active;
  std::map<std::string, std::size_t> slot;
  for (const auto& r : log) {
    const std::string key = case_key(r.verdict.patient_id, r.verdict.task);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, active.size());
      active.push_back(r.verdict);
    } else if (r.supersede) {
      active[it->second] = r.verdict;
    } else {
      throw DuplicateVerdict("case " + r.verdict.patient_id + " (" + std::string(to_string(r.verdict.task)) +
                             ") already has a verdict");
    }
  }
  return active;
}

std::vector<VerdictRecord> read_verdict_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<VerdictRecord> log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.push_back(verdict_record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

void write_verdict_log(const std::filesystem::path& path, const std::vector<VerdictRecord>& log) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& r : log) out << to_json(r).dump() << "\n";
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// ---- inputs ----------------------------------------------------------------

std::optional<bool> parse_boolean_label(std::string_view text) {
  const std::string v = trim_lower(text);
  if (v == "yes" || v == "1" || v == "true" || v == "positive") return true;
  if (v == "no" || v == "0" || v == "false" || v == "negative") return false;
  return std::nullopt;
}

std::vector<BaselineRow> read_baseline_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_file(path.string());
  const std::size_t id_col = table.require_column("patient_id");
  const std::size_t task_col = table.require_column("task");
  const std::size_t label_col = table.require_column("baseline_label");
  std::vector<BaselineRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path.string() + " row " + std::to_string(i + 2);
    auto task = parse_tier2_task(row[task_col]);
    if (!task) throw std::runtime_error(where + ": unknown task '" + row[task_col] + "'");
    auto label = parse_boolean_label(row[label_col]);
    if (!label) throw std::runtime_error(where + ": unreadable baseline_label '" + row[label_col] + "'");
    rows.push_back({row[id_col], *task, *label});
  }
  return rows;
}

Tier2Inputs join_predictions(const ResultsFile& results, const std::vector<BaselineRow>& baseline) {
  if (results.task == TaskName::tier1_qa) throw std::invalid_argument("tier-1 results carry no binary label");
  std::map<std::string, const BaselineRow*, std::less<>> by_id;
  for (const auto& b : baseline) {
    if (schema_of(b.task) != results.task) continue;
    if (!by_id.emplace(b.patient_id, &b).second) {
      throw std::invalid_argument("duplicate baseline row for " + b.patient_id);
    }
  }
  Tier2Inputs inputs;
  for (const auto& r : results.results) {
    if (r.status != TaskStatus::ok || !r.label) {
      inputs.unscored.push_back(r.patient_id);
      continue;
    }
    auto it = by_id.find(r.patient_id);
    if (it == by_id.end()) throw UnknownCase("no baseline label for " + r.patient_id);
    const BaselineRow& b = *it->second;
    inputs.cases.push_back(LabeledCase::make(r.patient_id, b.task, positive_of(*r.label, b.task), b.label));
  }
  return inputs;
}

// ---- report ----------------------------------------------------------------

namespace {

TaskReportRow summarize(std::string name, const std::vector<const LabeledCase*>& before,
                        const std::vector<const LabeledCase*>& after,
                        const std::vector<const AdjudicationVerdict*>& verdicts) {
  TaskReportRow row;
  row.task = std::move(name);
  for (const LabeledCase* c : before) {
    row.before += confusion({LabeledCase::make(c->patient_id, c->task, c->prediction, c->baseline_truth)});
    if (c->discordant()) ++row.discrepancies;
  }
  long long kept = 0, survived = 0;
  for (const LabeledCase* c : after) {
    row.after += confusion({*c});
    if (c->excluded()) continue;
    ++kept;
    if (*c->adjudicated_truth == c->baseline_truth) ++survived;
  }
  if (kept > 0) row.baseline_label_accuracy = percent_tenths(survived, kept);
  for (const AdjudicationVerdict* v : verdicts) {
    switch (v->verdict) {
      case Verdict::ground_truth_error:
        ++row.verdicts.ground_truth_error;
        break;
      case Verdict::model_error:
        ++row.verdicts.model_error;
        break;
      case Verdict::indeterminate:
        ++row.verdicts.indeterminate;
        break;
    }
  }
  return row;
}

json row_to_json(const TaskReportRow& row) {
  return {{"task", row.task},
          {"before", {{"counts", to_json(row.before)}, {"metrics", to_json(metrics(row.before))}}},
          {"after", {{"counts", to_json(row.after)}, {"metrics", to_json(metrics(row.after))}}},
          {"discrepancies", row.discrepancies},
          {"verdicts",
           {{"ground_truth_error", row.verdicts.ground_truth_error},
            {"model_error", row.verdicts.model_error},
            {"indeterminate", row.verdicts.indeterminate}}},
          {"baseline_label_accuracy", optional_tenths(row.baseline_label_accuracy)}};
}

std::string cell(const std::optional<Tenths>& v) { return v ? format_tenths(*v) : "n/a"; }

void render_line(std::ostream& out, const std::string& task, const char* phase, const ConfusionMatrix& cm) {
  const MetricsReport m = metrics(cm);
  out << std::left << std::setw(22) << task << std::setw(7) << phase << std::right << std::setw(5) << cm.n()
      << std::setw(6) << cm.tp << std::setw(6) << cm.fp << std::setw(6) << cm.fn << std::setw(6) << cm.tn
      << std::setw(8) << cell(m.precision) << std::setw(8) << cell(m.recall) << std::setw(8) << cell(m.f1)
      << std::setw(8) << cell(m.accuracy) << "\n";
}

}  // namespace

AdjudicationReport build_report(const std::vector<LabeledCase>& cases,
                                const std::vector<AdjudicationVerdict>& verdicts) {
  const std::vector<LabeledCase> adjudicated = apply_adjudication(cases, verdicts);
  AdjudicationReport report;
  std::vector<const LabeledCase*> all_before, all_after;
  std::vector<const AdjudicationVerdict*> all_verdicts;
  for (Tier2Task t : {Tier2Task::orn, Tier2Task::prostate_recurrence, Tier2Task::hn_recurrence}) {
    std::vector<const LabeledCase*> before, after;
    std::vector<const AdjudicationVerdict*> task_verdicts;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].task != t) continue;
      before.push_back(&cases[i]);
      after.push_back(&adjudicated[i]);
    }
    for (const auto& v : verdicts) {
      if (v.task == t) task_verdicts.push_back(&v);
    }
    if (before.empty()) continue;
    report.tasks.push_back(summarize(std::string(to_string(t)), before, after, task_verdicts));
    all_before.insert(all_before.end(), before.begin(), before.end());
    all_after.insert(all_after.end(), after.begin(), after.end());
    all_verdicts.insert(all_verdicts.end(), task_verdicts.begin(), task_verdicts.end());
  }
  report.total = summarize("total", all_before, all_after, all_verdicts);
  return report;
}

json to_json(const ConfusionMatrix& cm) {
  return {{"n", cm.n()}, {"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

json to_json(const MetricsReport& m) {
  return {{"precision", optional_tenths(m.precision)},
          {"recall", optional_tenths(m.recall)},
          {"f1", optional_tenths(m.f1)},
          {"accuracy", optional_tenths(m.accuracy)}};
}

json to_json(const AdjudicationReport& report) {
  json tasks = json::array();
  for (const auto& row : report.tasks) tasks.push_back(row_to_json(row));
  return {{"tasks", tasks}, {"total", row_to_json(report.total)}};
}

std::string render_report_text(const AdjudicationReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "Task" << std::setw(7) << "Adj." << std::right << std::setw(5) << "N"
      << std::setw(6) << "TP" << std::setw(6) << "FP" << std::setw(6) << "FN" << std::setw(6) << "TN" << std::setw(8)
      << "Pr.(%)" << std::setw(8) << "Re.(%)" << std::setw(8) << "F1(%)" << std::setw(8) << "Ac.(%)" << "\n";
  std::vector<const TaskReportRow*> rows;
  for (const auto& r : report.tasks) rows.push_back(&r);
  rows.push_back(&report.total);
  for (const TaskReportRow* row : rows) {
    render_line(out, row->task, "Before", row->before);
    render_line(out, row->task, "After", row->after);
  }
  out << "\n";
  for (const TaskReportRow* row : rows) {
    out << row->task << ": " << row->discrepancies << " discrepancies; verdicts " << row->verdicts.ground_truth_error
        << " ground_truth_error, " << row->verdicts.model_error << " model_error, " << row->verdicts.indeterminate
        << " indeterminate; baseline label accuracy after adjudication " << cell(row->baseline_label_accuracy)
        << "%\n";
  }
  return out.str();
}

}  // namespace labelflow
