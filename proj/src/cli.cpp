#include "labelflow/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "labelflow/adjudication_service.hpp"
#include "labelflow/cohort_synth.hpp"
#include "labelflow/evaluation.hpp"
#include "labelflow/http_backend.hpp"
#include "labelflow/scripted_backend.hpp"
#include "labelflow/task_streamer.hpp"

namespace labelflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string task;
  std::string store;
  std::uint64_t seed = 7;
  std::size_t concurrency = 4;
  std::string backend = "scripted";
  std::string out_dir;
  std::vector<std::string> baseline;
  std::vector<std::string> predictions;
  int port = 8080;
};

fs::path require_dir(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
  fs::path path(value);
  if (!fs::is_directory(path)) throw ConfigError(std::string(flag) + ": no such directory: " + value);
  return path;
}

fs::path require_file(const fs::path& path, const char* flag) {
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(flag) + ": no such file: " + path.string());
  return path;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// --predictions, falling back to <out-dir>/results.csv.
std::vector<fs::path> prediction_paths(const Options& o) {
  std::vector<fs::path> paths;
  for (const auto& p : o.predictions) paths.push_back(require_file(p, "--predictions"));
  if (paths.empty()) {
    if (o.out_dir.empty()) throw ConfigError("--predictions is required");
    paths.push_back(require_file(fs::path(o.out_dir) / "results.csv", "--predictions"));
  }
  return paths;
}

// --baseline, falling back to the baseline.csv beside the store recorded in
// each run's manifest.json.
std::vector<fs::path> baseline_paths(const Options& o, const std::vector<fs::path>& predictions) {
  std::vector<fs::path> paths;
  for (const auto& b : o.baseline) paths.push_back(require_file(b, "--baseline"));
  if (!paths.empty()) return paths;
  for (const auto& p : predictions) {
    const fs::path manifest = p.parent_path() / "manifest.json";
    if (!fs::is_regular_file(manifest)) continue;
    std::ifstream in(manifest);
    const json j = json::parse(in, nullptr, false);
    if (j.is_object() && j.contains("store") && j["store"].is_string()) {
      const fs::path candidate = fs::path(j["store"].get<std::string>()).parent_path() / "baseline.csv";
      if (fs::is_regular_file(candidate)) paths.push_back(candidate);
    }
  }
  if (paths.empty()) throw ConfigError("--baseline is required");
  return paths;
}

struct LoadedCases {
  std::vector<LabeledCase> cases;
  std::vector<std::string> unscored;
  std::map<std::string, fs::path> artifact_dirs;
};

LoadedCases load_cases(const Options& o) {
  const auto predictions = prediction_paths(o);
  std::vector<BaselineRow> baseline;
  for (const auto& b : baseline_paths(o, predictions)) {
    auto rows = read_baseline_csv(b);
    baseline.insert(baseline.end(), rows.begin(), rows.end());
  }
  LoadedCases loaded;
  for (const auto& p : predictions) {
    const ResultsFile file = read_results_csv(p);
    Tier2Inputs inputs = join_predictions(file, baseline);
    for (auto& c : inputs.cases) {
      loaded.artifact_dirs[c.patient_id] = p.parent_path();
      loaded.cases.push_back(std::move(c));
    }
    loaded.unscored.insert(loaded.unscored.end(), inputs.unscored.begin(), inputs.unscored.end());
  }
  return loaded;
}

std::vector<AdjudicationVerdict> stored_verdicts(const Options& o) {
  if (o.out_dir.empty()) return {};
  const fs::path log = fs::path(o.out_dir) / "verdicts.jsonl";
  if (!fs::is_regular_file(log)) return {};
  return active_verdicts(read_verdict_log(log));
}

int cmd_synth(const Options& o, std::ostream& out) {
  if (o.task.empty()) throw ConfigError("--task is required");
  auto task = parse_cohort_task(o.task);
  if (!task) throw UsageError("--task must be one of tier1_qa, orn, prostate_recurrence, hn_recurrence");
  CohortSpec spec = CohortSpec::defaults(*task);
  spec.seed = o.seed;
  const fs::path dir = o.out_dir.empty() ? fs::path("synth-" + o.task) : fs::path(o.out_dir);
  const GeneratedCohort cohort = generate_cohort(spec);
  write_cohort(cohort, dir);
  out << "wrote " << cohort.records.size() << " patients to " << (dir / "store").string() << "\n";
  return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
  if (o.task.empty()) throw ConfigError("--task is required");
  std::optional<TaskName> task = parse_task_name(o.task);
  if (!task) {
    auto cohort = parse_cohort_task(o.task);
    if (!cohort) throw UsageError("--task must be one of tier1_qa, orn, recurrence, prostate_recurrence, hn_recurrence");
    task = prompt_task(*cohort);
  }
  const fs::path store_dir = require_dir(o.store, "--store");
  if (o.concurrency == 0) throw UsageError("--concurrency must be positive");
  const fs::path out_dir = o.out_dir.empty() ? fs::path("run-" + o.task) : fs::path(o.out_dir);

  const Store store = Store::load(store_dir);
  const ToolRegistry registry = ToolRegistry::make_default();
  std::unique_ptr<ModelBackend> backend;
  if (o.backend == "scripted") {
    const fs::path manifest = fs::absolute(store_dir).parent_path() / "truth_manifest.csv";
    if (!fs::is_regular_file(manifest)) {
      throw ConfigError("--backend scripted needs " + manifest.string() + " beside the store");
    }
    backend = std::make_unique<ScriptedBackend>(read_manifest_csv(manifest), store, *task);
  } else if (o.backend == "http") {
    backend = std::make_unique<HttpBackend>(HttpBackendConfig::from_env());
  } else {
    throw UsageError("--backend must be scripted or http");
  }

  CohortDeps deps{.store = store,
                  .registry = registry,
                  .backend = *backend,
                  .out_dir = out_dir,
                  .seed = o.seed,
                  .backend_name = o.backend,
                  .store_dir = fs::absolute(store_dir)};
  const CohortRun run = run_cohort(store.patient_ids(), TaskSpec::for_task(*task, o.concurrency), deps);

  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : run.results) ++counts[static_cast<int>(r.status)];
  out << run.results.size() << " patients: " << counts[0] << " ok, " << counts[1] << " parse_error, " << counts[2]
      << " agent_error; peak in flight " << run.peak_in_flight << "\n";
  out << "results: " << (out_dir / "results.csv").string() << "\n";
  return kExitOk;
}

int cmd_eval_tier1(const Options& o, std::ostream& out) {
  if (o.predictions.empty()) throw ConfigError("--predictions is required");
  fs::path store_dir;
  if (!o.store.empty()) {
    store_dir = require_dir(o.store, "--store");
  } else {
    // A synth tree keeps fixtures/ next to store/.
    const fs::path guess = fs::absolute(o.predictions.front()).parent_path().parent_path() / "store";
    if (!fs::is_directory(guess)) throw ConfigError("--store is required");
    store_dir = guess;
  }
  const Store store = Store::load(store_dir);
  std::vector<TaskResult> results;
  for (const auto& p : o.predictions) {
    ResultsFile file = read_results_csv(require_file(p, "--predictions"));
    if (file.task != TaskName::tier1_qa) throw ConfigError("--predictions " + p + " is not a tier1_qa results file");
    results.insert(results.end(), file.results.begin(), file.results.end());
  }
  const Tier1Summary summary = evaluate_tier1(store, results);
  out << tier1_summary_text(summary);
  if (!o.out_dir.empty()) write_text(fs::path(o.out_dir) / "tier1_report.json", to_json(summary).dump(2) + "\n");
  return kExitOk;
}

int cmd_eval_tier2(const Options& o, std::ostream& out) {
  if (o.out_dir.empty()) throw ConfigError("--out-dir is required");
  const LoadedCases loaded = load_cases(o);
  const AdjudicationReport report = build_report(loaded.cases, stored_verdicts(o));
  std::string text = render_report_text(report);
  if (!loaded.unscored.empty()) text += std::to_string(loaded.unscored.size()) + " rows unscored (no valid answer)\n";
  json doc = to_json(report);
  doc["unscored"] = loaded.unscored;
  write_text(fs::path(o.out_dir) / "metrics_report.txt", text);
  write_text(fs::path(o.out_dir) / "metrics_report.json", doc.dump(2) + "\n");
  out << text;
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const LoadedCases loaded = load_cases(o);
  out << render_report_text(build_report(loaded.cases, stored_verdicts(o)));
  return kExitOk;
}

AdjudicationServer* g_server = nullptr;

int cmd_serve(const Options& o, std::ostream& out) {
  if (o.out_dir.empty()) throw ConfigError("--out-dir is required");
  LoadedCases loaded = load_cases(o);
  ServiceRun run;
  run.run_id = fs::absolute(o.out_dir).lexically_normal().filename().string();
  if (run.run_id.empty()) run.run_id = fs::absolute(o.out_dir).parent_path().filename().string();
  run.cases = std::move(loaded.cases);
  run.artifact_dirs = std::move(loaded.artifact_dirs);
  run.verdict_log = fs::path(o.out_dir) / "verdicts.jsonl";
  AdjudicationService service;
  service.load(std::move(run));

  ServerConfig config;
  config.port = o.port;
  if (const char* token = std::getenv("LABELFLOW_TOKEN")) config.token = token;
  AdjudicationServer server(service, config);
  out << "serving run '" << service.run_id() << "' on http://" << config.host << ":" << o.port << "/runs/"
      << service.run_id() << "/\n"
      << std::flush;
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  server.run();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int execute(int argc, const char* const argv[], std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Agentic outcome labeling: synthetic cohorts, agent runs, evaluation and adjudication.", "labelflow"};
  app.require_subcommand(1, 1);

  auto task_opt = [&](CLI::App* sub, const std::string& help) { sub->add_option("--task", o.task, help); };
  auto out_opt = [&](CLI::App* sub, const std::string& help) { sub->add_option("--out-dir", o.out_dir, help); };
  auto pred_opt = [&](CLI::App* sub) {
    sub->add_option("--predictions", o.predictions, "results.csv of a run (repeatable)");
  };
  auto base_opt = [&](CLI::App* sub) {
    sub->add_option("--baseline", o.baseline, "baseline CSV: patient_id,task,baseline_label (repeatable)");
  };

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic cohort with planted truth");
  task_opt(synth, "tier1_qa | orn | prostate_recurrence | hn_recurrence");
  synth->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  out_opt(synth, "output tree (default synth-<task>)");

  CLI::App* run = app.add_subcommand("run", "Run the labeling agent over every patient in a store");
  task_opt(run, "tier1_qa | orn | recurrence (prostate_recurrence and hn_recurrence map to recurrence)");
  run->add_option("--store", o.store, "patient store directory");
  run->add_option("--seed", o.seed, "seed recorded in the run manifest")->capture_default_str();
  run->add_option("--concurrency", o.concurrency, "patients in flight")->capture_default_str();
  run->add_option("--backend", o.backend, "scripted | http (http reads MODEL_ENDPOINT, MODEL_KEY, MODEL_NAME)")
      ->capture_default_str();
  out_opt(run, "run directory (default run-<task>)");

  CLI::App* tier1 = app.add_subcommand("eval-tier1", "Compare tier-1 answers with the store");
  pred_opt(tier1);
  tier1->add_option("--store", o.store, "patient store (default: store/ beside the predictions' directory)");
  out_opt(tier1, "where tier1_report.json goes (optional)");

  CLI::App* tier2 = app.add_subcommand("eval-tier2", "Confusion counts and metrics before and after adjudication");
  pred_opt(tier2);
  base_opt(tier2);
  out_opt(tier2, "run directory; reads verdicts.jsonl, writes metrics_report.{txt,json}");

  CLI::App* metrics_cmd = app.add_subcommand("metrics", "Print the metrics table");
  pred_opt(metrics_cmd);
  base_opt(metrics_cmd);
  out_opt(metrics_cmd, "run directory; verdicts.jsonl there is applied");

  CLI::App* serve = app.add_subcommand("serve", "Serve the adjudication API for one run");
  pred_opt(serve);
  base_opt(serve);
  out_opt(serve, "run directory; verdicts.jsonl there is the append-only log");
  serve->add_option("--port", o.port, "listen port on 127.0.0.1 (LABELFLOW_TOKEN sets a bearer token)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help("", CLI::AppFormatMode::All) : parsed.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (run->parsed()) return cmd_run(o, out);
    if (tier1->parsed()) return cmd_eval_tier1(o, out);
    if (tier2->parsed()) return cmd_eval_tier2(o, out);
    if (metrics_cmd->parsed()) return cmd_metrics(o, out);
    if (serve->parsed()) return cmd_serve(o, out);
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "Error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace labelflow
