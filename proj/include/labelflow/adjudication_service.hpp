#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "labelflow/error.hpp"
#include "labelflow/evaluation.hpp"

namespace httplib {
class Server;
}

namespace labelflow {

LABELFLOW_DEFINE_ERROR(NoRunLoaded);
LABELFLOW_DEFINE_ERROR(CorruptVerdictLog);

struct ServiceRun {
  std::string run_id;
  std::vector<LabeledCase> cases;
  // Directory holding transcripts/ and outputs/ for each patient.
  std::map<std::string, std::filesystem::path> artifact_dirs;
  std::filesystem::path verdict_log;
};

// Text of the section whose heading line mentions `heading`, up to the next
// heading or code fence. Empty when absent.
std::string extract_section(const std::string& text, std::string_view heading);

// Discrepancy queue, verdict log and metrics for one loaded run. Writers are
// serialized; readers always see a queue and metrics computed from the same
// log prefix.
class AdjudicationService {
 public:
  AdjudicationService() = default;

  // Replays the run's verdict log. Throws CorruptVerdictLog on a malformed
  // line, a sequence gap, or a record the cases reject.
  void load(ServiceRun run);

  std::string run_id() const;

  // Each throws NoRunLoaded unless `run_id` names the loaded run.
  nlohmann::json discrepancies(const std::string& run_id) const;
  nlohmann::json metrics(const std::string& run_id) const;
  // Throws UnknownCase for ids outside the run or without a transcript.
  nlohmann::json transcript(const std::string& run_id, const std::string& patient_id) const;

  // Appends to the log and refreshes the caches. Throws UnknownCase,
  // VerdictForConcordantCase or DuplicateVerdict; nothing is written then.
  VerdictRecord post_verdict(const std::string& run_id, AdjudicationVerdict verdict, bool supersede = false);

  std::vector<VerdictRecord> log() const;
  std::size_t queue_size() const;

 private:
  struct Snapshot {
    nlohmann::json queue = nlohmann::json::array();
    nlohmann::json metrics;
  };

  void require_run(const std::string& run_id) const;
  Snapshot compute(const std::vector<AdjudicationVerdict>& active) const;
  nlohmann::json queue_item(const LabeledCase& c) const;

  mutable std::shared_mutex mutex_;
  std::optional<ServiceRun> run_;
  std::vector<VerdictRecord> log_;
  std::vector<AdjudicationVerdict> active_;
  Snapshot snapshot_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string token;  // when set, requests need "Authorization: Bearer <token>"
};

// HTTP front end:
//   GET  /runs/{id}/discrepancies
//   POST /runs/{id}/verdicts
//   GET  /runs/{id}/metrics
//   GET  /runs/{id}/cases/{pid}/transcript
// Errors map to 400 (bad payload), 401, 404 (unknown run or case), 409
// (duplicate verdict) and 422 (concordant case), with {"error", "message"}.
class AdjudicationServer {
 public:
  AdjudicationServer(AdjudicationService& service, ServerConfig config);
  ~AdjudicationServer();

  AdjudicationServer(const AdjudicationServer&) = delete;
  AdjudicationServer& operator=(const AdjudicationServer&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();

 private:
  void routes();
  int bind();

  AdjudicationService& service_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace labelflow
