#include "labelflow/adjudication_service.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "labelflow/dates.hpp"

namespace labelflow {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string case_key(const std::string& patient_id, Tier2Task task) {
  return patient_id + '\x1f' + std::string(to_string(task));
}

bool is_heading(const std::string& line) {
  const auto start = line.find_first_not_of(" \t");
  return start != std::string::npos && line[start] == '#';
}

std::string utc_now() {
  return format_datetime(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now())) + "Z";
}

json phase_json(const ConfusionMatrix& cm) { return {{"counts", to_json(cm)}, {"metrics", to_json(metrics(cm))}}; }

}  // namespace

std::string extract_section(const std::string& text, std::string_view heading) {
  std::istringstream in(text);
  std::string line, out;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!inside) {
      inside = line.find(heading) != std::string::npos;
      continue;
    }
    if (is_heading(line) || line.rfind("```", 0) == 0) break;
    out += line + "\n";
  }
  const auto begin = out.find_first_not_of(" \n");
  if (begin == std::string::npos) return {};
  return out.substr(begin, out.find_last_not_of(" \n") - begin + 1);
}

void AdjudicationService::load(ServiceRun run) {
  std::vector<VerdictRecord> log;
  if (std::filesystem::exists(run.verdict_log)) {
    try {
      log = read_verdict_log(run.verdict_log);
    } catch (const std::exception& e) {
      throw CorruptVerdictLog(e.what());
    }
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].seq != i + 1) {
      throw CorruptVerdictLog(run.verdict_log.string() + ": expected seq " + std::to_string(i + 1) + ", found " +
                              std::to_string(log[i].seq));
    }
  }
  std::vector<AdjudicationVerdict> active;
  try {
    active = active_verdicts(log);
    apply_adjudication(run.cases, active);
  } catch (const Error& e) {
    throw CorruptVerdictLog(run.verdict_log.string() + ": " + e.what());
  }

  std::unique_lock lock(mutex_);
  run_ = std::move(run);
  log_ = std::move(log);
  active_ = std::move(active);
  snapshot_ = compute(active_);
}

std::string AdjudicationService::run_id() const {
  std::shared_lock lock(mutex_);
  return run_ ? run_->run_id : std::string();
}

void AdjudicationService::require_run(const std::string& run_id) const {
  if (!run_ || run_->run_id != run_id) throw NoRunLoaded("run '" + run_id + "' is not loaded");
}

json AdjudicationService::queue_item(const LabeledCase& c) const {
  json item{{"patient_id", c.patient_id},
            {"task", to_string(c.task)},
            {"prediction", c.prediction ? "positive" : "negative"},
            {"baseline_label", c.baseline_truth ? "positive" : "negative"},
            {"transcript", "/runs/" + run_->run_id + "/cases/" + c.patient_id + "/transcript"}};
  std::string final_text;
  if (auto it = run_->artifact_dirs.find(c.patient_id); it != run_->artifact_dirs.end()) {
    final_text = read_file(it->second / "outputs" / (c.patient_id + ".txt"));
  }
  item["excerpt"] = final_text.substr(0, 400);
  const std::string remarks = extract_section(final_text, "Concluding Remarks");
  item["rationale"] = remarks.empty() ? json::object() : json{{"concluding_remarks", remarks}};
  return item;
}

AdjudicationService::Snapshot AdjudicationService::compute(const std::vector<AdjudicationVerdict>& active) const {
  Snapshot s;
  std::map<std::string, bool> resolved;
  for (const auto& v : active) resolved[case_key(v.patient_id, v.task)] = true;
  for (const auto& c : list_discrepancies(run_->cases)) {
    if (!resolved.count(case_key(c.patient_id, c.task))) s.queue.push_back(queue_item(c));
  }
  const AdjudicationReport report = build_report(run_->cases, active);
  json before = json::object(), after = json::object();
  for (const auto& row : report.tasks) {
    before[row.task] = phase_json(row.before);
    after[row.task] = phase_json(row.after);
  }
  before["pooled"] = phase_json(report.total.before);
  after["pooled"] = phase_json(report.total.after);
  s.metrics = {{"run_id", run_->run_id},
               {"verdict_count", active.size()},
               {"queue_size", s.queue.size()},
               {"before", before},
               {"after", after},
               {"report", to_json(report)}};
  return s;
}

json AdjudicationService::discrepancies(const std::string& run_id) const {
  std::shared_lock lock(mutex_);
  require_run(run_id);
  return {{"run_id", run_id}, {"remaining", snapshot_.queue.size()}, {"items", snapshot_.queue}};
}

json AdjudicationService::metrics(const std::string& run_id) const {
  std::shared_lock lock(mutex_);
  require_run(run_id);
  return snapshot_.metrics;
}

json AdjudicationService::transcript(const std::string& run_id, const std::string& patient_id) const {
  std::shared_lock lock(mutex_);
  require_run(run_id);
  auto it = run_->artifact_dirs.find(patient_id);
  if (it == run_->artifact_dirs.end()) throw UnknownCase("no case " + patient_id + " in run " + run_id);
  const auto path = it->second / "transcripts" / (patient_id + ".jsonl");
  std::ifstream in(path);
  if (!in) throw UnknownCase("no transcript stored for " + patient_id);
  json messages = json::array();
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) messages.push_back(json::parse(line));
  }
  const std::string final_text = read_file(it->second / "outputs" / (patient_id + ".txt"));
  return {{"patient_id", patient_id},
          {"messages", messages},
          {"final_text", final_text},
          {"concluding_remarks", extract_section(final_text, "Concluding Remarks")}};
}

VerdictRecord AdjudicationService::post_verdict(const std::string& run_id, AdjudicationVerdict verdict,
                                                bool supersede) {
  std::unique_lock lock(mutex_);
  require_run(run_id);
  apply_adjudication(run_->cases, {verdict});

  std::vector<AdjudicationVerdict> candidate = active_;
  auto existing = std::find_if(candidate.begin(), candidate.end(), [&](const AdjudicationVerdict& v) {
    return v.patient_id == verdict.patient_id && v.task == verdict.task;
  });
  if (existing != candidate.end() && !supersede) {
    throw DuplicateVerdict("case " + verdict.patient_id + " (" + std::string(to_string(verdict.task)) +
                           ") already has a verdict");
  }
  if (verdict.decided_at.empty()) verdict.decided_at = utc_now();
  if (existing != candidate.end()) {
    *existing = verdict;
  } else {
    candidate.push_back(verdict);
  }

  VerdictRecord record{log_.size() + 1, verdict, supersede};
  {
    std::ofstream out(run_->verdict_log, std::ios::binary | std::ios::app);
    out << to_json(record).dump() << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed appending to " + run_->verdict_log.string());
  }
  log_.push_back(record);
  active_ = std::move(candidate);
  snapshot_ = compute(active_);
  return record;
}

std::vector<VerdictRecord> AdjudicationService::log() const {
  std::shared_lock lock(mutex_);
  return log_;
}

std::size_t AdjudicationService::queue_size() const {
  std::shared_lock lock(mutex_);
  return snapshot_.queue.size();
}

// ---- HTTP -----------------------------------------------------------------

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  reply(res, status, {{"error", kind}, {"message", message}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NoRunLoaded& e) {
    reply_error(res, 404, e.kind(), e.what());
  } catch (const UnknownCase& e) {
    reply_error(res, 404, e.kind(), e.what());
  } catch (const DuplicateVerdict& e) {
    reply_error(res, 409, e.kind(), e.what());
  } catch (const VerdictForConcordantCase& e) {
    reply_error(res, 422, e.kind(), e.what());
  } catch (const std::invalid_argument& e) {
    reply_error(res, 400, "BadRequest", e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "InternalError", e.what());
  }
}

}  // namespace

AdjudicationServer::AdjudicationServer(AdjudicationService& service, ServerConfig config)
    : service_(service), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

AdjudicationServer::~AdjudicationServer() { stop(); }

void AdjudicationServer::routes() {
  httplib::Server& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (!config_.token.empty() && req.get_header_value("Authorization") != "Bearer " + config_.token) {
      reply_error(res, 401, "Unauthorized", "missing or wrong bearer token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  s.Get(R"(/runs/([^/]+)/discrepancies)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service_.discrepancies(req.matches[1])); });
  });
  s.Get(R"(/runs/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service_.metrics(req.matches[1])); });
  });
  s.Get(R"(/runs/([^/]+)/cases/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service_.transcript(req.matches[1], req.matches[2])); });
  });
  s.Post(R"(/runs/([^/]+)/verdicts)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      VerdictRecord parsed = verdict_record_from_json(body);
      VerdictRecord stored = service_.post_verdict(req.matches[1], parsed.verdict, parsed.supersede);
      reply(res, 201, {{"ack", true}, {"record", to_json(stored)}, {"remaining", service_.queue_size()}});
    });
  });
}

int AdjudicationServer::bind() {
  if (config_.port == 0) return server_->bind_to_any_port(config_.host);
  return server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

int AdjudicationServer::start() {
  const int port = bind();
  if (port < 0) throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void AdjudicationServer::run() {
  if (bind() < 0) throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  server_->listen_after_bind();
}

void AdjudicationServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace labelflow
