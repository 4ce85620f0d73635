#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "labelflow/ehr_store.hpp"
#include "labelflow/error.hpp"
#include "labelflow/evaluation.hpp"
#include "labelflow/structured_output.hpp"
#include "labelflow/task_streamer.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(InfeasibleSpec);
LABELFLOW_DEFINE_ERROR(NoDigitPrefixedCourse);

enum class CohortTask { tier1_qa, orn, prostate_recurrence, hn_recurrence };

std::string_view to_string(CohortTask t);
std::optional<CohortTask> parse_cohort_task(std::string_view text);
TaskName prompt_task(CohortTask t);
std::optional<Tier2Task> tier2_task(CohortTask t);

// Planted discrepancies split by baseline label: among_negative become false
// positives before adjudication, among_positive false negatives.
struct PlantedSplit {
  std::size_t among_negative = 0;
  std::size_t among_positive = 0;

  std::size_t total() const { return among_negative + among_positive; }
  friend bool operator==(const PlantedSplit&, const PlantedSplit&) = default;
};

struct CohortSpec {
  CohortTask task = CohortTask::orn;
  // Baseline-positive and baseline-negative counts. For tier1_qa only the
  // sum matters.
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::uint64_t seed = 7;
  PlantedSplit gt_errors;
  PlantedSplit model_errors;
  PlantedSplit indeterminate;
  std::size_t truncated_courses = 0;  // tier1_qa: agent outputs with a cut course id

  std::size_t size() const { return n_positive + n_negative; }

  // Cohort sizes of the labeled datasets with discrepancy counts that
  // reproduce the reference before-adjudication confusion counts.
  static CohortSpec defaults(CohortTask task);

  // Throws InfeasibleSpec.
  void validate() const;

  friend bool operator==(const CohortSpec&, const CohortSpec&) = default;
};

nlohmann::json to_json(const CohortSpec& spec);
// Missing fields keep the task's defaults. Throws InfeasibleSpec on bad input.
CohortSpec cohort_spec_from_json(const nlohmann::json& j);

enum class Plant { none, gt_error, model_error, indeterminate };

std::string_view to_string(Plant p);

struct ManifestEntry {
  std::string patient_id;
  CohortTask task = CohortTask::orn;
  bool true_label = false;
  bool baseline_label = false;
  Plant plant = Plant::none;
  bool truncated_course = false;
  std::optional<int> true_stage;  // orn only
  std::vector<std::string> evidence_doc_ids;

  // What the scripted model answers: the truth, flipped for model errors and
  // indeterminate cases.
  bool predicted_label() const;
};

struct TruthManifest {
  std::vector<ManifestEntry> entries;  // ordered by patient_id

  const ManifestEntry* find(std::string_view patient_id) const;
};

// Columns: patient_id, task, true_label, baseline_label, flags, true_stage,
// evidence_doc_ids. Labels are yes/no and empty for tier1_qa.
void write_manifest_csv(std::ostream& out, const TruthManifest& manifest);
TruthManifest read_manifest_csv(const std::filesystem::path& path);

struct GeneratedCohort {
  CohortSpec spec;
  std::vector<PatientRecord> records;  // ordered by patient_id
  TruthManifest manifest;
};

// Pure function of the spec. Throws InfeasibleSpec.
GeneratedCohort generate_cohort(const CohortSpec& spec);

std::vector<BaselineRow> baseline_rows(const TruthManifest& manifest);

// One verdict per planted discrepancy, in patient_id order with seq 1..n.
std::vector<VerdictRecord> planted_verdicts(const TruthManifest& manifest);

// Output tree: store/<id>.json, truth_manifest.csv, cohort_spec.json, and
// either baseline.csv + planted_verdicts.jsonl or fixtures/tier1.csv.
void write_cohort(const GeneratedCohort& cohort, const std::filesystem::path& out_dir);

struct OracleLabel {
  bool positive = false;
  int stage = 0;  // orn only
  std::vector<std::string> evidence_doc_ids;
};

// Keyword and threshold rules over the generator's vocabulary:
//   orn: fracture / full-thickness -> 3, sequestrectomy -> 2, exposed bone
//        persisting >= 3 months without healing -> 1;
//   prostate: a post-treatment PSA reaching nadir + 2 ng/mL, or a
//        biopsy-proven recurrence;
//   head and neck: imaging or pathology naming a recurrence after treatment.
// Throws std::invalid_argument for tier1_qa.
OracleLabel oracle_label(const PatientRecord& record, CohortTask task);

// Correct tier-1 answers straight from the store, one ok row per id.
std::vector<TaskResult> tier1_reference_outputs(const Store& store, const std::vector<std::string>& patient_ids);

std::string strip_leading_digits(std::string_view course_id);

enum class TruncationMode { first_course, every_course };

// Copies `outputs` and drops the leading digit run from the digit-prefixed
// course ids reported for each target. The store is not touched. Throws
// NoDigitPrefixedCourse when a target's output has no such course and
// UnknownPatient when a target has no output row.
std::vector<TaskResult> plant_tier1_bug(const Store& store, std::vector<TaskResult> outputs,
                                        const std::vector<std::string>& targets,
                                        TruncationMode mode = TruncationMode::first_course);

}  // namespace labelflow
