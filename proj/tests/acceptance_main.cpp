// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "labelflow/cli.hpp"
#include "labelflow/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/output_corpus.hpp"
#include "support/pruner_oracle.hpp"
#include "support/retrieval_oracle.hpp"
#include "support/reference_rows.hpp"

using namespace labelflow;
using namespace labelflow::testing;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kMetricTolerancePp = 0.05;
constexpr double kMetricOracleBudgetS = 1.0;
constexpr double kPrunerBudgetS = 10.0;
constexpr double kEndToEndBudgetS = 300.0;
constexpr int kPrunerConversations = 1000;
constexpr int kRetrievalCalls = 500;
constexpr std::size_t kConcurrency = 4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

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

std::string cm_text(const ConfusionMatrix& cm) {
  return "(" + std::to_string(cm.tp) + "," + std::to_string(cm.fp) + "," + std::to_string(cm.fn) + "," +
         std::to_string(cm.tn) + ")";
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  int cells = 0, off = 0;
  for (const auto& row : reference_rows()) {
    const MetricsReport m = metrics(row.cm());
    const OracleMetrics o = oracle_metrics(row.cm());
    const std::optional<Tenths> got[] = {m.precision, m.recall, m.f1, m.accuracy};
    const std::optional<double> oracle[] = {o.precision, o.recall, o.f1, o.accuracy};
    const double reference[] = {row.precision, row.recall, row.f1, row.accuracy};
    for (int k = 0; k < 4; ++k) {
      ++cells;
      if (!within(got[k], reference[k], kMetricTolerancePp + 1e-9) || as_percent(got[k]) != oracle[k]) ++off;
    }
  }
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << cells - off << "/" << cells << " metric cells within " << kMetricTolerancePp << " pp; " << s << " s";
  return {off == 0 && s < kMetricOracleBudgetS, d.str()};
}

Outcome pooling() {
  const auto& r = reference_rows();
  const ConfusionMatrix before = micro_average({r[0].cm(), r[2].cm(), r[4].cm()});
  const ConfusionMatrix after = micro_average({r[1].cm(), r[3].cm(), r[5].cm()});
  const bool ok = before == r[6].cm() && after == r[7].cm() && r[6].cm() == ConfusionMatrix{113, 39, 9, 234} &&
                  r[7].cm() == ConfusionMatrix{131, 14, 4, 241};
  return {ok, "Before " + cm_text(before) + ", After " + cm_text(after)};
}

Outcome orn_reconstruction() {
  const auto cases = cases_for({30, 32, 4, 167}, Tier2Task::orn);
  const auto after = confusion(apply_adjudication(cases, verdicts_for(cases, {18, 11, 3, 3, 0, 1})));
  return {after == ConfusionMatrix{48, 11, 0, 170} && after.n() == 229,
          cm_text(after) + " n=" + std::to_string(after.n())};
}

Outcome pruner_suite() {
  const auto t0 = Clock::now();
  const FuzzOutcome f = fuzz_pruner(20250101, kPrunerConversations);
  const bool one = worked_example_one().match, two = worked_example_two().match;
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << f.conversations << " conversations (" << f.pruned << " pruned), over budget " << f.over_budget
    << ", system changed " << f.system_changed << ", not prefix " << f.not_prefix << ", not idempotent "
    << f.not_idempotent << ", oracle mismatch " << f.oracle_mismatch << "; worked examples "
    << (one && two ? "match" : "differ") << "; " << s << " s";
  return {f.passed() && f.conversations == kPrunerConversations && one && two && s < kPrunerBudgetS, d.str()};
}

Outcome tier1_at_scale(const std::filesystem::path& root) {
  const std::string dir = (root / "tier1").string();
  const Invocation synth = cli({"synth", "--task", "tier1_qa", "--out-dir", dir});
  if (synth.code != 0) return {false, "synth failed: " + synth.err};
  const Invocation eval = cli({"eval-tier1", "--predictions", dir + "/fixtures/tier1.csv"});
  const std::string expected = "3000/3000 demographic fields matched\n497/500 treatment matches (99.4%)\n";
  std::string detail = eval.out;
  for (auto& c : detail) c = c == '\n' ? ';' : c;
  return {eval.code == 0 && eval.out == expected, detail};
}

Outcome end_to_end(const std::filesystem::path& root) {
  const auto t0 = Clock::now();
  struct Expected {
    const char* task;
    std::size_t n;
    ConfusionMatrix before, after;
  };
  const Expected expected[] = {{"orn", 233, {30, 32, 4, 167}, {48, 11, 0, 170}},
                               {"prostate_recurrence", 80, {37, 3, 3, 37}, {39, 1, 3, 37}},
                               {"hn_recurrence", 82, {46, 4, 2, 30}, {48, 1, 1, 31}}};
  const std::regex peak_re("peak in flight (\\d+)");
  bool ok = true;
  std::ostringstream d;
  for (const auto& e : expected) {
    const std::string dir = (root / e.task).string();
    const Invocation synth = cli({"synth", "--task", e.task, "--out-dir", dir});
    const Invocation run = cli({"run", "--task", e.task, "--store", dir + "/store", "--out-dir", dir + "/run",
                                "--concurrency", std::to_string(kConcurrency)});
    std::filesystem::copy_file(dir + "/planted_verdicts.jsonl", dir + "/run/verdicts.jsonl");
    const Invocation eval = cli({"eval-tier2", "--out-dir", dir + "/run"});
    if (synth.code != 0 || run.code != 0 || eval.code != 0) {
      return {false, std::string(e.task) + ": " + synth.err + run.err + eval.err};
    }
    std::smatch m;
    const std::size_t peak = std::regex_search(run.out, m, peak_re) ? std::stoul(m[1].str()) : 0;
    const json report = json::parse(slurp(dir + "/run/metrics_report.json"));
    auto counts = [](const json& c) {
      return ConfusionMatrix{c["tp"].get<long long>(), c["fp"].get<long long>(), c["fn"].get<long long>(),
                             c["tn"].get<long long>()};
    };
    const ConfusionMatrix before = counts(report["tasks"][0]["before"]["counts"]);
    const ConfusionMatrix after = counts(report["tasks"][0]["after"]["counts"]);
    const bool task_ok = before == e.before && after == e.after && static_cast<std::size_t>(before.n()) == e.n &&
                         peak == kConcurrency && report["unscored"].empty();
    ok = ok && task_ok;
    d << e.task << " " << cm_text(before) << "->" << cm_text(after) << " peak " << peak << "; ";
  }
  const double s = seconds_since(t0);
  d << s << " s";
  return {ok && s < kEndToEndBudgetS, d.str()};
}

Outcome output_corpus() {
  int formats = 0, mutations = 0;
  std::string first_bad;
  for (const auto& c : format_cases()) {
    if (classify(c) == c.expect) {
      ++formats;
    } else if (first_bad.empty()) {
      first_bad = c.name;
    }
  }
  const auto muts = mutation_cases();
  for (const auto& c : muts) {
    if (classify(c) == c.expect) {
      ++mutations;
    } else if (first_bad.empty()) {
      first_bad = c.name;
    }
  }
  std::string detail = std::to_string(formats) + "/3 formats, " + std::to_string(mutations) + "/" +
                       std::to_string(muts.size()) + " mutations";
  if (!first_bad.empty()) detail += "; first failure: " + first_bad;
  return {formats == 3 && mutations == 20 && muts.size() == 20, detail};
}

Outcome retrieval_ordering() {
  const RetrievalCheck c = check_retrieval_ordering(99, kRetrievalCalls);
  std::string detail = std::to_string(c.calls - c.mismatches) + "/" + std::to_string(c.calls) + " calls match";
  if (c.mismatches) detail += "; first failure: " + c.first_failure;
  return {c.calls == kRetrievalCalls && c.mismatches == 0, detail};
}

}  // namespace

int main() {
  TempDir root("lf-acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric-oracle", metric_oracle},
      {"pooling", pooling},
      {"orn-adjudication-reconstruction", orn_reconstruction},
      {"pruner-suite", pruner_suite},
      {"tier1-replication-at-scale", [&] { return tier1_at_scale(root.path()); }},
      {"end-to-end-determinism", [&] { return end_to_end(root.path()); }},
      {"structured-output-corpus", output_corpus},
      {"retrieval-ordering", retrieval_ordering},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed;
}
