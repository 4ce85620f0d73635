#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "labelflow/adjudication_service.hpp"
#include "labelflow/cohort_synth.hpp"
#include "labelflow/scripted_backend.hpp"
#include "labelflow/tool_registry.hpp"
#include "support/fixtures.hpp"

using namespace labelflow;
using namespace labelflow::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// One scripted ORN run with artifacts on disk, shared by every test.
struct OrnRun {
  TempDir dir{"lf-svc"};
  TruthManifest manifest;
  std::vector<LabeledCase> cases;
  std::map<std::string, fs::path> artifacts;

  OrnRun() {
    GeneratedCohort cohort = generate_cohort(CohortSpec::defaults(CohortTask::orn));
    manifest = cohort.manifest;
    const Store store = Store::from_records(std::move(cohort.records));
    const ToolRegistry registry = ToolRegistry::make_default();
    ScriptedBackend backend(manifest, store, TaskName::orn);
    std::vector<std::string> ids;
    for (const auto& e : manifest.entries) ids.push_back(e.patient_id);
    const fs::path out = dir / "run";
    CohortRun run = run_cohort(ids, TaskSpec::for_task(TaskName::orn),
                               {.store = store, .registry = registry, .backend = backend, .agent = {}, .out_dir = out});
    ResultsFile file{TaskName::orn, run.results, {}};
    cases = join_predictions(file, baseline_rows(manifest)).cases;
    for (const auto& id : ids) artifacts[id] = out;
  }
};

const OrnRun& orn_run() {
  static const OrnRun run;
  return run;
}

ServiceRun service_run(const fs::path& log, const std::string& id = "orn-run") {
  return {id, orn_run().cases, orn_run().artifacts, log};
}

std::vector<AdjudicationVerdict> planted() { return active_verdicts(planted_verdicts(orn_run().manifest)); }

std::size_t line_count(const fs::path& path) {
  const std::string text = slurp(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

json verdict_body(const AdjudicationVerdict& v) {
  return {{"patient_id", v.patient_id}, {"task", to_string(v.task)}, {"verdict", to_string(v.verdict)},
          {"reviewer", "rev"}};
}

ConfusionMatrix counts(const json& phase) {
  const json& c = phase["counts"];
  return {c["tp"].get<long long>(), c["fp"].get<long long>(), c["fn"].get<long long>(), c["tn"].get<long long>()};
}

}  // namespace

TEST(ExtractSection, StopsAtNextHeadingOrFence) {
  const std::string text = "## Summary\nsome\n## Concluding Remarks\nBone exposed.\nStage 2.\n\n## Answer\nx";
  EXPECT_EQ(extract_section(text, "Concluding Remarks"), "Bone exposed.\nStage 2.");
  EXPECT_EQ(extract_section("## Concluding Remarks\nDone.\n```\n{}\n```", "Concluding Remarks"), "Done.");
  EXPECT_EQ(extract_section("no headings at all", "Concluding Remarks"), "");
}

TEST(Service, RequiresLoadedRun) {
  AdjudicationService service;
  EXPECT_THROW(service.discrepancies("x"), NoRunLoaded);
  TempDir dir;
  service.load(service_run(dir / "v.jsonl"));
  EXPECT_THROW(service.metrics("other"), NoRunLoaded);
  EXPECT_EQ(service.run_id(), "orn-run");
}

TEST(Service, QueueListsEveryDiscrepancyWithRationale) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  const json q = service.discrepancies("orn-run");
  ASSERT_EQ(q["remaining"], 36);
  ASSERT_EQ(q["items"].size(), 36u);
  for (std::size_t i = 0; i < 36; ++i) {
    const json& item = q["items"][i];
    if (i) EXPECT_LT(q["items"][i - 1]["patient_id"].get<std::string>(), item["patient_id"].get<std::string>());
    EXPECT_NE(item["prediction"], item["baseline_label"]);
    EXPECT_FALSE(item["excerpt"].get<std::string>().empty());
    EXPECT_TRUE(item["rationale"].contains("concluding_remarks"));
  }
}

TEST(Service, PlantedVerdictsDrainQueueAndGiveAfterCounts) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  const json before = service.metrics("orn-run")["before"];
  const auto verdicts = planted();
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const VerdictRecord r = service.post_verdict("orn-run", verdicts[i]);
    EXPECT_EQ(r.seq, i + 1);
    EXPECT_EQ(service.queue_size(), verdicts.size() - i - 1);
    EXPECT_EQ(service.metrics("orn-run")["before"], before);
  }
  const json m = service.metrics("orn-run");
  EXPECT_EQ(counts(m["before"]["orn"]), (ConfusionMatrix{30, 32, 4, 167}));
  EXPECT_EQ(counts(m["after"]["orn"]), (ConfusionMatrix{48, 11, 0, 170}));
  EXPECT_EQ(counts(m["after"]["pooled"]), (ConfusionMatrix{48, 11, 0, 170}));
  EXPECT_EQ(m["after"]["orn"]["metrics"]["precision"], "81.4");
  EXPECT_EQ(line_count(dir / "v.jsonl"), 36u);
}

TEST(Service, ReplayReproducesState) {
  TempDir dir;
  json expected;
  {
    AdjudicationService service;
    service.load(service_run(dir / "v.jsonl"));
    const auto verdicts = planted();
    for (std::size_t i = 0; i < 20; ++i) service.post_verdict("orn-run", verdicts[i]);
    expected = service.metrics("orn-run");
    expected["queue"] = service.discrepancies("orn-run");
  }
  AdjudicationService replayed;
  replayed.load(service_run(dir / "v.jsonl"));
  json got = replayed.metrics("orn-run");
  got["queue"] = replayed.discrepancies("orn-run");
  EXPECT_EQ(got, expected);
  EXPECT_EQ(replayed.log().size(), 20u);
}

TEST(Service, RejectedVerdictsWriteNothing) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  const auto verdicts = planted();
  service.post_verdict("orn-run", verdicts[0]);
  EXPECT_THROW(service.post_verdict("orn-run", verdicts[0]), DuplicateVerdict);
  AdjudicationVerdict concordant = verdicts[0];
  for (const auto& c : orn_run().cases) {
    if (!c.discordant()) {
      concordant.patient_id = c.patient_id;
      break;
    }
  }
  EXPECT_THROW(service.post_verdict("orn-run", concordant), VerdictForConcordantCase);
  AdjudicationVerdict ghost = verdicts[1];
  ghost.patient_id = "NOBODY";
  EXPECT_THROW(service.post_verdict("orn-run", ghost), UnknownCase);
  EXPECT_EQ(service.log().size(), 1u);
  EXPECT_EQ(line_count(dir / "v.jsonl"), 1u);
}

TEST(Service, SupersedeReplacesTheActiveVerdict) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  AdjudicationVerdict v = planted()[0];
  v.verdict = Verdict::model_error;
  service.post_verdict("orn-run", v);
  const json first = service.metrics("orn-run")["after"]["orn"];
  v.verdict = Verdict::indeterminate;
  service.post_verdict("orn-run", v, true);
  const json second = service.metrics("orn-run")["after"]["orn"];
  EXPECT_EQ(counts(first).n() - 1, counts(second).n());
  EXPECT_EQ(service.metrics("orn-run")["verdict_count"], 1);
  EXPECT_EQ(service.log().size(), 2u);
}

TEST(Service, AllIndeterminateExcludesEveryDiscrepancy) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  for (auto v : planted()) {
    v.verdict = Verdict::indeterminate;
    service.post_verdict("orn-run", v);
  }
  EXPECT_EQ(counts(service.metrics("orn-run")["after"]["orn"]), (ConfusionMatrix{30, 0, 0, 167}));
}

TEST(Service, ConcurrentPostsKeepSeqGapless) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  const auto verdicts = planted();
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < verdicts.size(); i += 6) {
        service.post_verdict("orn-run", verdicts[i]);
        service.metrics("orn-run");
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto log = read_verdict_log(dir / "v.jsonl");
  ASSERT_EQ(log.size(), verdicts.size());
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].seq, i + 1);
  EXPECT_EQ(counts(service.metrics("orn-run")["after"]["orn"]), (ConfusionMatrix{48, 11, 0, 170}));
}

TEST(Service, CorruptLogsRejectedOnLoad) {
  TempDir dir;
  const auto verdicts = planted();
  write_verdict_log(dir / "gap.jsonl", {{1, verdicts[0], false}, {3, verdicts[1], false}});
  AdjudicationService service;
  EXPECT_THROW(service.load(service_run(dir / "gap.jsonl")), CorruptVerdictLog);
  spit(dir / "bad.jsonl", "{not json\n");
  EXPECT_THROW(service.load(service_run(dir / "bad.jsonl")), CorruptVerdictLog);
  write_verdict_log(dir / "dup.jsonl", {{1, verdicts[0], false}, {2, verdicts[0], false}});
  EXPECT_THROW(service.load(service_run(dir / "dup.jsonl")), CorruptVerdictLog);
}

TEST(Service, TranscriptCarriesMessagesAndRemarks) {
  TempDir dir;
  AdjudicationService service;
  service.load(service_run(dir / "v.jsonl"));
  const std::string id = planted()[0].patient_id;
  const json t = service.transcript("orn-run", id);
  EXPECT_EQ(t["patient_id"], id);
  EXPECT_GT(t["messages"].size(), 2u);
  EXPECT_FALSE(t["concluding_remarks"].get<std::string>().empty());
  EXPECT_THROW(service.transcript("orn-run", "NOBODY"), UnknownCase);
}

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_.load(service_run(dir_ / "v.jsonl"));
    server_ = std::make_unique<AdjudicationServer>(service_, ServerConfig{"127.0.0.1", 0, token_});
    port_ = server_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    if (!token_.empty()) client_->set_bearer_token_auth(token_);
  }
  void TearDown() override { server_->stop(); }

  httplib::Result post(const json& body) {
    return client_->Post("/runs/orn-run/verdicts", body.dump(), "application/json");
  }

  std::string token_;
  TempDir dir_;
  AdjudicationService service_;
  std::unique_ptr<AdjudicationServer> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(ServerTest, DiscrepanciesAndMetrics) {
  auto res = client_->Get("/runs/orn-run/discrepancies");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["remaining"], 36);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  res = client_->Get("/runs/orn-run/metrics");
  ASSERT_TRUE(res);
  EXPECT_EQ(counts(json::parse(res->body)["before"]["pooled"]), (ConfusionMatrix{30, 32, 4, 167}));
}

TEST_F(ServerTest, PostAcknowledgesAndShrinksQueue) {
  const auto v = planted()[0];
  auto res = post(verdict_body(v));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const json body = json::parse(res->body);
  EXPECT_TRUE(body["ack"].get<bool>());
  EXPECT_EQ(body["record"]["seq"], 1);
  EXPECT_EQ(body["remaining"], 35);
  EXPECT_EQ(json::parse(client_->Get("/runs/orn-run/discrepancies")->body)["remaining"], 35);
}

TEST_F(ServerTest, ErrorStatuses) {
  const auto v = planted()[0];
  ASSERT_EQ(post(verdict_body(v))->status, 201);
  auto res = post(verdict_body(v));
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body)["error"], "DuplicateVerdict");

  json concordant = verdict_body(v);
  for (const auto& c : orn_run().cases) {
    if (!c.discordant()) {
      concordant["patient_id"] = c.patient_id;
      break;
    }
  }
  EXPECT_EQ(post(concordant)->status, 422);

  json ghost = verdict_body(v);
  ghost["patient_id"] = "NOBODY";
  EXPECT_EQ(post(ghost)->status, 404);
  EXPECT_EQ(client_->Get("/runs/other/metrics")->status, 404);
  EXPECT_EQ(client_->Get("/runs/orn-run/cases/NOBODY/transcript")->status, 404);

  EXPECT_EQ(client_->Post("/runs/orn-run/verdicts", "{oops", "application/json")->status, 400);
  json bad = verdict_body(planted()[1]);
  bad["verdict"] = "unsure";
  res = post(bad);
  EXPECT_EQ(res->status, 400);
  EXPECT_NE(json::parse(res->body)["message"].get<std::string>().find("unsure"), std::string::npos);
  EXPECT_EQ(service_.log().size(), 1u);
}

TEST_F(ServerTest, TranscriptAndPreflight) {
  const std::string id = planted()[0].patient_id;
  auto res = client_->Get(("/runs/orn-run/cases/" + id + "/transcript").c_str());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["patient_id"], id);
  res = client_->Options("/runs/orn-run/verdicts");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

class AuthServerTest : public ServerTest {
 protected:
  void SetUp() override {
    token_ = "s3cret";
    ServerTest::SetUp();
  }
};

TEST_F(AuthServerTest, TokenRequired) {
  EXPECT_EQ(client_->Get("/runs/orn-run/metrics")->status, 200);
  httplib::Client anonymous("127.0.0.1", port_);
  auto res = anonymous.Get("/runs/orn-run/metrics");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  anonymous.set_bearer_token_auth("wrong");
  EXPECT_EQ(anonymous.Get("/runs/orn-run/metrics")->status, 401);
  EXPECT_EQ(anonymous.Options("/runs/orn-run/metrics")->status, 204);
}
