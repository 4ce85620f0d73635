#include "labelflow/task_streamer.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "labelflow/dates.hpp"
#include "labelflow/prompts.hpp"

namespace labelflow {

using nlohmann::json;

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++count;
  return count;
}

std::vector<std::string> label_columns(TaskName task) {
  switch (task) {
    case TaskName::tier1_qa:
      return {"reported_patient_id", "first_name", "last_name", "sex", "race", "ethnicity", "delivered_courses"};
    case TaskName::orn:
      return {"stage", "total_records"};
    case TaskName::recurrence:
      return {"recurrence"};
  }
  return {};
}

std::vector<std::string> label_fields(const std::optional<Label>& label, TaskName task) {
  std::vector<std::string> fields(label_columns(task).size());
  if (!label) return fields;
  if (const auto* t = std::get_if<Tier1Label>(&*label)) {
    fields = {t->patient_id, t->first_name, t->last_name, t->sex,
              t->race,       t->ethnicity,  courses_to_json(t->delivered_courses).dump()};
  } else if (const auto* o = std::get_if<OrnLabel>(&*label)) {
    fields = {std::to_string(o->stage), std::to_string(o->total_records)};
  } else if (const auto* r = std::get_if<RecurrenceLabel>(&*label)) {
    fields = {r->recurrence ? "yes" : "no"};
  }
  return fields;
}

std::string raw_output_path(const std::string& patient_id) { return "outputs/" + patient_id + ".txt"; }

std::string iso_utc(std::chrono::system_clock::time_point t) {
  return format_datetime(std::chrono::time_point_cast<std::chrono::seconds>(t)) + "Z";
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_artifacts(const CohortRun& run, const CohortDeps& deps) {
  const auto& dir = *deps.out_dir;
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary | std::ios::trunc);
    write_results_csv(csv, run.results, run.spec.task);
  }
  for (std::size_t i = 0; i < run.results.size(); ++i) {
    const TaskResult& r = run.results[i];
    std::ostringstream lines;
    if (run.transcripts[i].turns > 0) {
      for (const auto& m : run.transcripts[i].messages) lines << to_json(m).dump() << "\n";
    } else {
      lines << json{{"error", r.error}}.dump() << "\n";
    }
    write_file(dir / "transcripts" / (r.patient_id + ".jsonl"), lines.str());
    write_file(dir / raw_output_path(r.patient_id), r.status == TaskStatus::agent_error ? r.error : r.raw_final_text);
  }

  json counts = json::object();
  for (TaskStatus s : {TaskStatus::ok, TaskStatus::parse_error, TaskStatus::agent_error}) {
    counts[std::string(to_string(s))] = 0;
  }
  for (const auto& r : run.results) {
    auto& slot = counts[std::string(to_string(r.status))];
    slot = slot.get<int>() + 1;
  }
  json manifest{{"task", to_string(run.spec.task)},
                {"output_schema", to_string(run.spec.output_schema)},
                {"template_sha256", sha256_hex(run.spec.template_text)},
                {"concurrency", run.spec.concurrency},
                {"seed", deps.seed},
                {"backend", deps.backend_name},
                {"store", deps.store_dir ? json(deps.store_dir->string()) : json(nullptr)},
                {"cohort_size", run.results.size()},
                {"peak_in_flight", run.peak_in_flight},
                {"status_counts", counts},
                {"turn_cap", deps.agent.turn_cap},
                {"pruner",
                 {{"max_history_tokens", deps.agent.pruner.max_history_tokens},
                  {"words_per_pass", deps.agent.pruner.words_per_pass},
                  {"min_threshold_tokens", deps.agent.pruner.min_threshold_tokens},
                  {"threshold_decrement_tokens", deps.agent.pruner.threshold_decrement_tokens}}},
                {"started_at", iso_utc(run.started_at)},
                {"finished_at", iso_utc(run.finished_at)}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

std::string render_prompt(std::string_view template_text, std::string_view patient_id) {
  auto pos = template_text.find(kPatientPlaceholder);
  if (pos == std::string_view::npos) throw MissingPlaceholder("template has no {patient_id} placeholder");
  std::string out;
  out.reserve(template_text.size() + patient_id.size());
  out.append(template_text.substr(0, pos));
  out.append(patient_id);
  out.append(template_text.substr(pos + kPatientPlaceholder.size()));
  return out;
}

TaskSpec TaskSpec::for_task(TaskName task, std::size_t concurrency) {
  TaskSpec spec;
  spec.task = task;
  spec.output_schema = task;
  spec.concurrency = concurrency;
  switch (task) {
    case TaskName::tier1_qa:
      spec.template_text = prompts::kTier1QaTemplate;
      break;
    case TaskName::orn:
      spec.template_text = prompts::kOrnTemplate;
      break;
    case TaskName::recurrence:
      spec.template_text = prompts::kRecurrenceTemplate;
      break;
  }
  return spec;
}

void TaskSpec::validate() const {
  if (count_occurrences(template_text, kPatientPlaceholder) != 1) {
    throw std::invalid_argument("template must contain {patient_id} exactly once");
  }
  if (concurrency == 0) throw std::invalid_argument("concurrency must be positive");
}

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::ok:
      return "ok";
    case TaskStatus::parse_error:
      return "parse_error";
    case TaskStatus::agent_error:
      return "agent_error";
  }
  return "agent_error";
}

std::optional<TaskStatus> parse_task_status(std::string_view text) {
  for (TaskStatus s : {TaskStatus::ok, TaskStatus::parse_error, TaskStatus::agent_error}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

TaskResult interpret_final_text(const std::string& patient_id, const std::string& final_text, TaskName schema) {
  TaskResult r;
  r.patient_id = patient_id;
  r.raw_final_text = final_text;
  try {
    r.label = validate_output(extract_structured(final_text), schema);
    r.status = TaskStatus::ok;
  } catch (const Error& e) {
    r.status = TaskStatus::parse_error;
    r.error = e.what();
  }
  return r;
}

CohortRun run_cohort(const std::vector<std::string>& patient_ids, const TaskSpec& spec, CohortDeps deps) {
  spec.validate();
  CohortRun run;
  run.spec = spec;
  run.results.resize(patient_ids.size());
  run.transcripts.resize(patient_ids.size());
  run.started_at = std::chrono::system_clock::now();

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> peak{0};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= patient_ids.size()) return;
      const std::string& id = patient_ids[i];

      const std::size_t now_in_flight = in_flight.fetch_add(1) + 1;
      std::size_t seen = peak.load();
      while (now_in_flight > seen && !peak.compare_exchange_weak(seen, now_in_flight)) {
      }

      const auto start = deps.clock();
      TaskResult result;
      AgentTranscript transcript;
      try {
        transcript = run_agent(id, render_prompt(spec.template_text, id), deps.registry, deps.store, deps.backend,
                               deps.agent);
        result = interpret_final_text(id, transcript.final_text, spec.output_schema);
        std::size_t records = 0;
        for (const auto& entry : transcript.tool_call_log) {
          if (entry.status == ToolStatus::ok) records += entry.records_count;
        }
        result.records_count = records;
        result.turns = transcript.turns;
      } catch (const Error& e) {
        result = TaskResult{};
        result.patient_id = id;
        result.status = TaskStatus::agent_error;
        result.error = e.what();
      } catch (const std::exception& e) {
        result = TaskResult{};
        result.patient_id = id;
        result.status = TaskStatus::agent_error;
        result.error = std::string("InternalError: ") + e.what();
      }
      result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deps.clock() - start).count();
      in_flight.fetch_sub(1);

      run.results[i] = std::move(result);
      run.transcripts[i] = std::move(transcript);
    }
  };

  const std::size_t workers = std::min(spec.concurrency, patient_ids.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  run.peak_in_flight = peak.load();
  run.finished_at = std::chrono::system_clock::now();
  if (deps.out_dir) write_artifacts(run, deps);
  return run;
}

std::vector<std::string> results_header(TaskName task) {
  std::vector<std::string> header{"patient_id", "task", "status"};
  for (auto& c : label_columns(task)) header.push_back(std::move(c));
  for (const char* c : {"records_count", "turns", "latency_ms", "raw_output_path"}) header.emplace_back(c);
  return header;
}

std::vector<std::string> results_row(const TaskResult& r, TaskName task) {
  std::vector<std::string> row{r.patient_id, std::string(to_string(task)), std::string(to_string(r.status))};
  for (auto& f : label_fields(r.label, task)) row.push_back(std::move(f));
  row.push_back(r.records_count ? std::to_string(*r.records_count) : "");
  row.push_back(std::to_string(r.turns));
  row.push_back(std::to_string(r.latency_ms));
  row.push_back(raw_output_path(r.patient_id));
  return row;
}

void write_results_csv(std::ostream& out, const std::vector<TaskResult>& results, TaskName task) {
  write_csv_row(out, results_header(task));
  for (const auto& r : results) write_csv_row(out, results_row(r, task));
}

ResultsFile read_results_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_file(path.string());
  ResultsFile file;
  if (table.column("stage")) {
    file.task = TaskName::orn;
  } else if (table.column("recurrence")) {
    file.task = TaskName::recurrence;
  } else if (table.column("delivered_courses")) {
    file.task = TaskName::tier1_qa;
  } else {
    throw std::runtime_error(path.string() + ": no recognizable label columns");
  }
  const auto col = [&](std::string_view name) { return table.require_column(name); };
  const std::size_t id_col = col("patient_id"), status_col = col("status"), records_col = col("records_count"),
                    turns_col = col("turns"), latency_col = col("latency_ms"), raw_col = col("raw_output_path");
  for (const auto& row : table.rows) {
    TaskResult r;
    r.patient_id = row[id_col];
    auto status = parse_task_status(row[status_col]);
    if (!status) throw std::runtime_error(path.string() + ": unknown status '" + row[status_col] + "'");
    r.status = *status;
    if (!row[records_col].empty()) r.records_count = std::stoull(row[records_col]);
    r.turns = row[turns_col].empty() ? 0 : std::stoull(row[turns_col]);
    r.latency_ms = row[latency_col].empty() ? 0 : std::stoll(row[latency_col]);
    if (r.status == TaskStatus::ok) {
      switch (file.task) {
        case TaskName::tier1_qa: {
          Tier1Label t;
          t.patient_id = row[col("reported_patient_id")];
          t.first_name = row[col("first_name")];
          t.last_name = row[col("last_name")];
          t.sex = row[col("sex")];
          t.race = row[col("race")];
          t.ethnicity = row[col("ethnicity")];
          t.delivered_courses = courses_from_json(json::parse(row[col("delivered_courses")]));
          r.label = std::move(t);
          break;
        }
        case TaskName::orn:
          r.label = validate_output(json{{"stage", row[col("stage")]}, {"total_records", row[col("total_records")]}},
                                    TaskName::orn);
          break;
        case TaskName::recurrence:
          r.label = validate_output(json{{"recurrence", row[col("recurrence")]}}, TaskName::recurrence);
          break;
      }
    }
    file.results.push_back(std::move(r));
    file.raw_output_paths.push_back(row[raw_col]);
  }
  return file;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

}  // namespace labelflow
