#include <gtest/gtest.h>

#include <sstream>

#include "labelflow/cli.hpp"
#include "support/fixtures.hpp"

using namespace labelflow;
using namespace labelflow::testing;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation cli(std::vector<std::string> args) {
  args.insert(args.begin(), "labelflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = execute(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, HelpListsEveryFlag) {
  const Invocation r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const char* word : {"synth", "run", "eval-tier1", "eval-tier2", "metrics", "serve", "--task", "--store",
                           "--seed", "--concurrency", "--backend", "--out-dir", "--predictions", "--baseline",
                           "--port"}) {
    EXPECT_TRUE(contains(r.out, word)) << word;
  }
  const Invocation sub = cli({"run", "--help"});
  EXPECT_EQ(sub.code, kExitOk);
  EXPECT_TRUE(contains(sub.out, "--concurrency"));
}

TEST(Cli, UsageErrors) {
  Invocation r = cli({"run", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_TRUE(contains(r.err, "UsageError"));
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"synth", "--task", "lung"}).code, kExitUsage);
}

TEST(Cli, MissingStoreIsAConfigError) {
  const Invocation r = cli({"run", "--task", "orn"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_TRUE(contains(r.err, "ConfigError"));
  EXPECT_TRUE(contains(r.err, "--store"));
  TempDir dir;
  const Invocation missing = cli({"run", "--task", "orn", "--store", (dir / "nope").string()});
  EXPECT_EQ(missing.code, kExitConfig);
  EXPECT_TRUE(contains(missing.err, "--store"));
}

TEST(Cli, SynthRunEvalTier2) {
  TempDir dir;
  const std::string root = (dir / "hn").string();
  Invocation r = cli({"synth", "--task", "hn_recurrence", "--out-dir", root});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(contains(r.out, "wrote 82 patients"));

  const std::string run_dir = root + "/run";
  r = cli({"run", "--task", "hn_recurrence", "--store", root + "/store", "--out-dir", run_dir});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(contains(r.out, "82 patients: 82 ok, 0 parse_error, 0 agent_error; peak in flight 4"));
  for (const char* f : {"results.csv", "manifest.json"}) EXPECT_TRUE(fs::exists(fs::path(run_dir) / f)) << f;

  r = cli({"eval-tier2", "--out-dir", run_dir});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string no_verdicts = r.out;
  EXPECT_TRUE(contains(no_verdicts, "92.0"));  // before precision

  fs::copy_file(root + "/planted_verdicts.jsonl", run_dir + "/verdicts.jsonl");
  r = cli({"eval-tier2", "--out-dir", run_dir});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(contains(r.out, "98.0"));  // after precision 48/49
  EXPECT_TRUE(fs::exists(run_dir + "/metrics_report.json"));
  const std::string report = slurp(run_dir + "/metrics_report.txt");

  // Rerunning the evaluation changes nothing.
  r = cli({"eval-tier2", "--out-dir", run_dir});
  EXPECT_EQ(slurp(run_dir + "/metrics_report.txt"), report);
  EXPECT_EQ(cli({"metrics", "--out-dir", run_dir}).out, report);
}

TEST(Cli, RerunsProduceIdenticalAnswers) {
  TempDir dir;
  const std::string root = (dir / "pr").string();
  ASSERT_EQ(cli({"synth", "--task", "prostate_recurrence", "--out-dir", root}).code, kExitOk);
  for (const char* run : {"/a", "/b"}) {
    ASSERT_EQ(cli({"run", "--task", "prostate_recurrence", "--store", root + "/store", "--out-dir", root + run,
                   "--concurrency", "3"})
                  .code,
              kExitOk);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(root + "/a/outputs")) {
    EXPECT_EQ(slurp(e.path()), slurp(root + "/b/outputs/" + e.path().filename().string()));
    ++compared;
  }
  EXPECT_EQ(compared, 80u);
}

TEST(Cli, EvalTier1OnFixtureAndScriptedRun) {
  TempDir dir;
  const std::string root = (dir / "t1").string();
  ASSERT_EQ(cli({"synth", "--task", "tier1_qa", "--out-dir", root}).code, kExitOk);
  Invocation r = cli({"eval-tier1", "--predictions", root + "/fixtures/tier1.csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "3000/3000 demographic fields matched\n497/500 treatment matches (99.4%)\n");

  ASSERT_EQ(cli({"run", "--task", "tier1_qa", "--store", root + "/store", "--out-dir", root + "/run"}).code, kExitOk);
  r = cli({"eval-tier1", "--predictions", root + "/run/results.csv", "--store", root + "/store", "--out-dir",
           root + "/run"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(contains(r.out, "497/500 treatment matches (99.4%)"));
  EXPECT_TRUE(fs::exists(root + "/run/tier1_report.json"));
}

TEST(Cli, EvalTier2NeedsOutDir) {
  const Invocation r = cli({"eval-tier2"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_TRUE(contains(r.err, "--out-dir"));
}
