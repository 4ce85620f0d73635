#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labelflow/agent.hpp"
#include "labelflow/csv.hpp"
#include "labelflow/error.hpp"
#include "labelflow/structured_output.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(MissingPlaceholder);

inline constexpr std::string_view kPatientPlaceholder = "{patient_id}";

// Substitutes the single "{patient_id}" placeholder; nothing else changes.
std::string render_prompt(std::string_view template_text, std::string_view patient_id);

struct TaskSpec {
  TaskName task = TaskName::tier1_qa;
  std::string template_text;
  TaskName output_schema = TaskName::tier1_qa;
  std::size_t concurrency = 4;

  // Built-in task with its stock prompt.
  static TaskSpec for_task(TaskName task, std::size_t concurrency = 4);

  // Throws std::invalid_argument unless the template holds the placeholder
  // exactly once and concurrency is positive.
  void validate() const;
};

enum class TaskStatus { ok, parse_error, agent_error };

std::string_view to_string(TaskStatus s);
std::optional<TaskStatus> parse_task_status(std::string_view text);

struct TaskResult {
  std::string patient_id;
  TaskStatus status = TaskStatus::agent_error;
  std::optional<Label> label;
  std::string raw_final_text;
  std::optional<std::size_t> records_count;
  long long latency_ms = 0;
  std::size_t turns = 0;
  std::string error;  // kind and message for non-ok rows
};

struct CohortRun {
  TaskSpec spec;
  std::vector<TaskResult> results;  // input order
  std::chrono::system_clock::time_point started_at;
  std::chrono::system_clock::time_point finished_at;
  std::size_t peak_in_flight = 0;
  std::vector<AgentTranscript> transcripts;  // parallel to results; empty for agent errors
};

struct CohortDeps {
  const Store& store;
  const ToolRegistry& registry;
  ModelBackend& backend;
  AgentConfig agent{};
  std::optional<std::filesystem::path> out_dir;  // artifacts written when set
  std::uint64_t seed = 0;
  std::string backend_name = "unspecified";
  std::optional<std::filesystem::path> store_dir;  // recorded in manifest.json
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

// Runs the task for every patient with at most spec.concurrency agents in
// flight. Per-patient failures become row statuses. When deps.out_dir is set,
// writes results.csv, transcripts/<id>.jsonl, outputs/<id>.txt and
// manifest.json, all in input order.
CohortRun run_cohort(const std::vector<std::string>& patient_ids, const TaskSpec& spec, CohortDeps deps);

// Structured answer for one final text: extract, validate, classify.
TaskResult interpret_final_text(const std::string& patient_id, const std::string& final_text, TaskName schema);

// results.csv layout: fixed columns with the task's label fields in the middle.
std::vector<std::string> results_header(TaskName task);
std::vector<std::string> results_row(const TaskResult& result, TaskName task);
void write_results_csv(std::ostream& out, const std::vector<TaskResult>& results, TaskName task);

// Parsed rows of a results.csv, label fields decoded by task. Rows whose
// status is not ok carry no label.
struct ResultsFile {
  TaskName task = TaskName::tier1_qa;
  std::vector<TaskResult> results;
  std::vector<std::string> raw_output_paths;
};
ResultsFile read_results_csv(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

}  // namespace labelflow
