#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "labelflow/ehr_store.hpp"
#include "labelflow/error.hpp"
#include "labelflow/structured_output.hpp"
#include "labelflow/task_streamer.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(VerdictForConcordantCase);
LABELFLOW_DEFINE_ERROR(DuplicateVerdict);
LABELFLOW_DEFINE_ERROR(UnknownCase);

// ---- Tier 1 ---------------------------------------------------------------

enum class DiffKind { value_mismatch, missing_course, extra_course, count_mismatch };

std::string_view to_string(DiffKind k);

struct Tier1Diff {
  std::string patient_id;
  std::string field_path;  // e.g. demographics.sex, course[2PROS].icd_codes
  std::string expected;
  std::string actual;
  DiffKind kind = DiffKind::value_mismatch;
};

inline constexpr std::size_t kDemographicFieldCount = 6;

// Demographics: patient_id byte-exact, the other five case-insensitive after
// trimming. Courses pair up by exact course_id; ICD codes and plan ids are
// compared as sets and the reported radiation_type must be a delivered type.
std::vector<Tier1Diff> compare_tier1(const PatientRecord& expected, const Tier1Label& actual);

std::size_t demographic_mismatches(const std::vector<Tier1Diff>& diffs);
bool treatment_matches(const std::vector<Tier1Diff>& diffs);

struct Tier1Summary {
  std::size_t patients = 0;
  std::size_t demographic_fields_matched = 0;
  std::size_t demographic_fields_total = 0;
  std::size_t treatment_matches = 0;
  std::size_t unscored = 0;  // rows without a schema-valid answer
  std::vector<Tier1Diff> diffs;
};

// Scores every result row against the store. Rows that are not ok count as
// unmatched on every field. Throws UnknownPatient for ids absent from the store.
Tier1Summary evaluate_tier1(const Store& store, const std::vector<TaskResult>& results);

// "3000/3000 demographic fields matched" and "497/500 treatment matches (99.4%)".
std::string tier1_summary_text(const Tier1Summary& summary);
nlohmann::json to_json(const Tier1Summary& summary);

// ---- Tier 2 ---------------------------------------------------------------

enum class Tier2Task { orn, prostate_recurrence, hn_recurrence };

std::string_view to_string(Tier2Task t);
std::optional<Tier2Task> parse_tier2_task(std::string_view text);
TaskName schema_of(Tier2Task t);

// orn: stage >= 1; recurrence: "yes". Throws std::invalid_argument when the
// label does not belong to the task's schema.
bool positive_of(const Label& label, Tier2Task task);

struct LabeledCase {
  std::string patient_id;
  Tier2Task task = Tier2Task::orn;
  bool prediction = false;
  bool baseline_truth = false;
  std::optional<bool> adjudicated_truth;  // nullopt: excluded as indeterminate

  static LabeledCase make(std::string patient_id, Tier2Task task, bool prediction, bool baseline_truth);
  bool excluded() const { return !adjudicated_truth.has_value(); }
  bool discordant() const { return prediction != baseline_truth; }
};

struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long n() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Cells from (prediction, adjudicated truth); excluded cases are skipped.
ConfusionMatrix confusion(const std::vector<LabeledCase>& cases);

// Percentage in tenths of a point: 743 means 74.3%.
using Tenths = long long;

// round-half-up(1000 * num / den) in exact integer arithmetic; den > 0.
Tenths percent_tenths(long long num, long long den);
std::string format_tenths(Tenths value);

struct MetricsReport {
  std::optional<Tenths> precision;
  std::optional<Tenths> recall;
  std::optional<Tenths> f1;
  std::optional<Tenths> accuracy;
};

MetricsReport metrics(const ConfusionMatrix& cm);

// Cell-wise sum. Throws std::invalid_argument on an empty list.
ConfusionMatrix micro_average(const std::vector<ConfusionMatrix>& matrices);

// Cases whose prediction disagrees with the baseline, ordered by patient_id
// then task.
std::vector<LabeledCase> list_discrepancies(const std::vector<LabeledCase>& cases);

enum class Verdict { ground_truth_error, model_error, indeterminate };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

struct AdjudicationVerdict {
  std::string patient_id;
  Tier2Task task = Tier2Task::orn;
  Verdict verdict = Verdict::model_error;
  std::string note;
  std::string reviewer;
  std::string decided_at;  // ISO-8601 UTC
};

// ground_truth_error flips the baseline, model_error keeps it, indeterminate
// excludes the case. Predictions never change.
//
// Throws UnknownCase, VerdictForConcordantCase or DuplicateVerdict.
std::vector<LabeledCase> apply_adjudication(std::vector<LabeledCase> cases,
                                            const std::vector<AdjudicationVerdict>& verdicts);

// One line of the append-only verdict log.
struct VerdictRecord {
  std::uint64_t seq = 0;
  AdjudicationVerdict verdict;
  bool supersede = false;
};

nlohmann::json to_json(const VerdictRecord& record);
// Throws std::invalid_argument naming the offending field.
VerdictRecord verdict_record_from_json(const nlohmann::json& j);

// Folds a log into the active verdict per case: a later record replaces an
// earlier one only when it carries the supersede flag. Throws DuplicateVerdict
// otherwise.
std::vector<AdjudicationVerdict> active_verdicts(const std::vector<VerdictRecord>& log);

std::vector<VerdictRecord> read_verdict_log(const std::filesystem::path& path);
void write_verdict_log(const std::filesystem::path& path, const std::vector<VerdictRecord>& log);

// ---- inputs ----------------------------------------------------------------

struct BaselineRow {
  std::string patient_id;
  Tier2Task task = Tier2Task::orn;
  bool label = false;
};

// yes/no, 1/0, true/false, positive/negative, case-insensitive.
std::optional<bool> parse_boolean_label(std::string_view text);

// CSV with columns patient_id, task, baseline_label.
std::vector<BaselineRow> read_baseline_csv(const std::filesystem::path& path);

struct Tier2Inputs {
  std::vector<LabeledCase> cases;
  std::vector<std::string> unscored;  // rows whose status was not ok
};

// Joins predictions with the baseline rows of the same schema on patient_id.
// Throws UnknownCase for a scored prediction without a baseline row and
// std::invalid_argument for tier-1 results or duplicate baseline rows.
Tier2Inputs join_predictions(const ResultsFile& results, const std::vector<BaselineRow>& baseline);

// ---- report ----------------------------------------------------------------

struct VerdictCounts {
  std::size_t ground_truth_error = 0;
  std::size_t model_error = 0;
  std::size_t indeterminate = 0;
};

struct TaskReportRow {
  std::string task;  // task name or "total"
  ConfusionMatrix before;
  ConfusionMatrix after;
  std::size_t discrepancies = 0;
  VerdictCounts verdicts;
  // Share of non-excluded cases whose baseline label survived adjudication;
  // absent when no case remains.
  std::optional<Tenths> baseline_label_accuracy;
};

struct AdjudicationReport {
  std::vector<TaskReportRow> tasks;  // in Tier2Task order, only tasks present
  TaskReportRow total;
};

AdjudicationReport build_report(const std::vector<LabeledCase>& cases,
                                const std::vector<AdjudicationVerdict>& verdicts);

nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const AdjudicationReport& report);

// Table layout: one Before and one After line per task, then the pooled total.
std::string render_report_text(const AdjudicationReport& report);

}  // namespace labelflow
