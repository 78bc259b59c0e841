// Copyright 2026 The Plum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance gate over the fixture corpus. Prints one PASS/FAIL line per
// criterion and exits nonzero if any primary criterion fails. Arguments,
// if given, restrict the run to the named criteria.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plum/consistency.h"
#include "plum/mutator.h"
#include "plum/pipeline.h"
#include "plum/preference.h"
#include "plum/report.h"
#include "plum/sandbox.h"
#include "plum/util/io.h"
#include "plum/util/parallel.h"
#include "plum/util/process.h"
#include "fmt/ranges.h"
#include "spdlog/spdlog.h"
#include "support/fixtures.h"

namespace plum {
namespace {

namespace fs = std::filesystem;

constexpr double kOracleRuntimeLimitSeconds = 180.0;
constexpr double kTimeoutLimitSeconds = 2.0;
constexpr double kTimeoutSlack = 1.5;
constexpr size_t kMinMutations = 1000;
constexpr double kMinBehaviorChangeRate = 0.90;
constexpr double kReexecTimeoutSeconds = 5.0;
constexpr int kReexecParallelism = 8;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict Check(bool ok, std::string detail) { return {ok, std::move(detail)}; }

// Runs candidate + test with a plain interpreter, without the shim or the
// sandbox status mapping. Exit 0 is a pass.
class Reexecutor {
 public:
  explicit Reexecutor(std::string dir) : dir_(std::move(dir)) { MakeDirs(dir_); }

  bool Passes(const std::string& code, const std::string& test) {
    std::string key = code + '\0' + test;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    size_t id;
    {
      std::lock_guard<std::mutex> lock(mu_);
      id = next_++;
    }
    std::string path = dir_ + "/prog_" + std::to_string(id) + ".py";
    WriteFileAtomic(path, code + "\n\n" + test + "\n");
    ProcessSpec spec;
    spec.argv = {"python3", "-S", path};
    spec.env = {"PATH=/usr/bin:/bin", "PYTHONDONTWRITEBYTECODE=1"};
    spec.cwd = dir_;
    spec.timeout_seconds = kReexecTimeoutSeconds;
    ProcessResult r = RunProcess(spec);
    bool ok = r.kind == ProcessResult::Kind::kExited && r.exit_code == 0;
    std::lock_guard<std::mutex> lock(mu_);
    cache_[key] = ok;
    return ok;
  }

 private:
  std::string dir_;
  std::mutex mu_;
  size_t next_ = 0;
  std::map<std::string, bool> cache_;
};

struct RunOutput {
  std::string dir;
  RunReport report;
  double seconds = 0;
};

RunOutput RunFixture(const std::string& dir, const Json& patch, bool online) {
  MakeDirs(dir);
  std::string cfg = testing::WriteFixtureConfig(dir, patch);
  auto start = std::chrono::steady_clock::now();
  Pipeline p(cfg);
  RunReport report = online ? p.RunOnline() : p.RunOffline();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {dir, report, secs};
}

std::vector<Json> Records(const std::string& path) {
  std::vector<Json> out;
  if (!FileExists(path)) return out;
  for (const auto& r : ReadJsonl(path)) out.push_back(r.value);
  return out;
}

std::vector<std::string> ChunkDirs(const std::string& work_dir) {
  std::vector<std::string> dirs;
  for (const auto& e : fs::directory_iterator(work_dir + "/chunks")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::vector<TestArtifact> Artifacts(const std::string& work_dir) {
  std::vector<TestArtifact> out;
  for (const auto& d : ChunkDirs(work_dir)) {
    for (const auto& j : Records(d + "/test_artifacts.jsonl")) out.push_back(TestArtifactFromJson(j));
  }
  return out;
}

std::vector<Json> Groups(const std::string& work_dir) {
  std::vector<Json> out;
  for (const auto& d : ChunkDirs(work_dir)) {
    for (auto& j : Records(d + "/groups.jsonl")) out.push_back(std::move(j));
  }
  return out;
}

// Positive from the recorded matrix alone: runnable and every test Pass.
bool RecordedPositive(const Json& candidate) {
  if (!candidate.at("runnable").get<bool>()) return false;
  const Json& per = candidate.at("per_test");
  if (per.empty()) return false;
  for (const auto& [key, status] : per.items()) {
    if (status != "Pass") return false;
  }
  return true;
}

std::set<std::string> Ids(const std::vector<Json>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.at("instruction_id").get<std::string>());
  return ids;
}

class Acceptance {
 public:
  explicit Acceptance(std::string root) : root_(std::move(root)), reexec_(root_ + "/reexec") {}

  const RunOutput& Main() {
    if (!main_) main_ = RunFixture(root_ + "/main", Json::object(), false);
    return *main_;
  }

  std::map<std::string, std::vector<std::string>> SurvivingTests() {
    std::map<std::string, std::vector<std::string>> tests;
    for (const auto& a : Artifacts(Main().dir + "/work")) {
      if (a.consistent.value_or(false)) tests[a.instruction_id].push_back(a.test_code);
    }
    return tests;
  }

  Verdict OracleRoundTrip() {
    const RunOutput& run = Main();
    auto tests = SurvivingTests();
    auto pairs = Records(run.report.emitted.at(0).dpo);
    if (pairs.empty()) return Check(false, "no dpo pairs");
    std::vector<int> chosen_ok(pairs.size(), 0);
    std::vector<int> rejected_ok(pairs.size(), 0);
    ParallelFor(pairs.size(), kReexecParallelism, [&](size_t i) {
      const auto& suite = tests[pairs[i]["instruction_id"].get<std::string>()];
      std::string chosen = pairs[i]["chosen"];
      std::string rejected = pairs[i]["rejected"];
      bool all = !suite.empty();
      for (const auto& t : suite) all = all && reexec_.Passes(chosen, t);
      chosen_ok[i] = all;
      bool any_fail = false;
      for (const auto& t : suite) {
        if (!reexec_.Passes(rejected, t)) {
          any_fail = true;
          break;
        }
      }
      rejected_ok[i] = any_fail;
    });
    size_t c = std::count(chosen_ok.begin(), chosen_ok.end(), 1);
    size_t r = std::count(rejected_ok.begin(), rejected_ok.end(), 1);
    bool ok = c == pairs.size() && r == pairs.size() && run.seconds < kOracleRuntimeLimitSeconds &&
              run.report.counters.Balanced();
    return Check(ok, fmt::format("{} pairs, chosen pass {}/{}, rejected fail {}/{}, run {:.1f}s "
                                 "(limit {:.0f}s)",
                                 pairs.size(), c, pairs.size(), r, pairs.size(), run.seconds,
                                 kOracleRuntimeLimitSeconds));
  }

  Verdict ChosenRejectedRule() {
    SandboxConfig sc = testing::FastSandbox(kReexecParallelism);
    sc.short_circuit = false;
    Sandbox sandbox(sc);
    std::vector<TestArtifact> tests;
    for (int t = 0; t < 3; ++t) {
      TestArtifact a;
      a.instruction_id = "pattern";
      a.gen_index = t;
      a.test_code = "assert f(" + std::to_string(t) + ")";
      a.consistent = true;
      tests.push_back(a);
    }
    std::vector<CandidateSolution> candidates;
    for (int mask = 0; mask < 8; ++mask) {
      CandidateSolution c;
      c.instruction_id = "pattern";
      c.candidate_id = mask;
      c.code = "def f(i):\n    return (" + std::to_string(mask) + " >> i) & 1 == 1\n";
      candidates.push_back(c);
    }
    GradeStage stage = GradeCandidates(candidates, tests, sandbox);
    int exact = 0;
    for (int mask = 0; mask < 8; ++mask) {
      const LabeledCandidate& lc = stage.labeled[static_cast<size_t>(mask)];
      bool matrix_ok = lc.per_test.size() == 3;
      for (size_t t = 0; matrix_ok && t < 3; ++t) {
        bool pass = lc.per_test[t].second == ExecStatus::kPass;
        matrix_ok = pass == (((mask >> t) & 1) == 1);
      }
      bool label_ok = IsPositive(lc) == (mask == 7) && IsNegative(lc, false) == (mask != 7);
      exact += matrix_ok && label_ok;
    }
    InstructionGroup g{"pattern", "p", stage.labeled};
    DpoBuild dpo = BuildDpo({g}, PreferenceConfig{});
    bool pairs_ok = dpo.pairs.size() == 1;
    for (const auto& p : dpo.pairs) pairs_ok = pairs_ok && p.chosen == candidates[7].code;
    return Check(exact == 8 && pairs_ok,
                 fmt::format("{}/8 patterns labeled as expected, {} pair choosing 0b111",
                             exact, dpo.pairs.size()));
  }

  Verdict NoPositiveFiltering() {
    const RunOutput& run = Main();
    std::set<std::string> no_positive;
    std::set<std::string> with_positive;
    for (const auto& g : Groups(run.dir + "/work")) {
      bool any = false;
      for (const auto& c : g["candidates"]) any = any || RecordedPositive(c);
      (any ? with_positive : no_positive).insert(g["instruction_id"].get<std::string>());
    }
    auto dpo = Ids(Records(run.report.emitted[0].dpo));
    auto kto = Ids(Records(run.report.emitted[0].kto));
    size_t leaked = 0;
    for (const auto& id : no_positive) leaked += dpo.count(id) + kto.count(id);
    bool kto_covers = kto == with_positive;
    bool ok = leaked == 0 && kto_covers && !no_positive.empty() &&
              static_cast<int64_t>(no_positive.size()) ==
                  run.report.counters.instructions_dropped_no_positive;
    return Check(ok, fmt::format("{} instructions without positives, {} output records reference "
                                 "them; kto covers exactly the {} with positives: {}",
                                 no_positive.size(), leaked, with_positive.size(), kto_covers));
  }

  Verdict ConsistencyStatistics() {
    struct Row {
      const char* name;
      int64_t passed;
      int64_t total;
      const char* expected;
    };
    const Row rows[] = {{"row1", 2869, 4500, "63.76"},
                        {"row2", 2543, 6000, "42.38"},
                        {"row3", 2056, 4500, "45.69"}};
    std::vector<ConsistencyRow> table;
    std::string got;
    bool rates_ok = true;
    for (const auto& r : rows) {
      TestArtifact blank;
      blank.test_code = "assert True";
      std::vector<TestArtifact> artifacts(static_cast<size_t>(r.total), blank);
      std::vector<ExecutionOutcome> outcomes(artifacts.size());
      for (size_t i = 0; i < outcomes.size(); ++i) {
        outcomes[i].status = static_cast<int64_t>(i) < r.passed ? ExecStatus::kPass
                                                                : ExecStatus::kTestFailure;
      }
      FilterResult f = FoldConsistency(std::move(artifacts), outcomes);
      table.push_back({r.name, f.stats});
    }
    Json report = ConsistencyReport(table);
    for (size_t i = 0; i < 3; ++i) {
      std::string text = report[i]["rate_text"];
      got += (i ? " / " : "") + text;
      rates_ok = rates_ok && text == rows[i].expected;
    }
    // Fixture references built to fail their own tests.
    size_t inconsistent = 0;
    size_t mismatched = 0;
    size_t kept_inconsistent = 0;
    auto artifacts = Artifacts(Main().dir + "/work");
    std::vector<int> independent(artifacts.size());
    ParallelFor(artifacts.size(), kReexecParallelism, [&](size_t i) {
      independent[i] = reexec_.Passes(artifacts[i].reference_solution, artifacts[i].test_code);
    });
    auto tests = SurvivingTests();
    for (size_t i = 0; i < artifacts.size(); ++i) {
      bool consistent = artifacts[i].consistent.value_or(false);
      if (!consistent) {
        ++inconsistent;
        const auto& kept = tests[artifacts[i].instruction_id];
        kept_inconsistent +=
            std::count(kept.begin(), kept.end(), artifacts[i].test_code) > 0 ? 1 : 0;
      }
      mismatched += consistent != static_cast<bool>(independent[i]);
    }
    bool ok = rates_ok && inconsistent > 0 && mismatched == 0 && kept_inconsistent == 0;
    return Check(ok, fmt::format("rates {}; {} inconsistent fixture references dropped, {} verdicts "
                                 "disagree with re-execution, {} leaked into surviving tests",
                                 got, inconsistent, mismatched, kept_inconsistent));
  }

  Verdict Determinism() {
    const RunOutput& p8 = Main();
    RunOutput p1 = RunFixture(root_ + "/serial", Json{{"sandbox", {{"parallelism", 1}}}}, false);
    const DatasetPaths& a = p8.report.emitted.at(0);
    const DatasetPaths& b = p1.report.emitted.at(0);
    std::vector<std::pair<std::string, std::string>> files = {{a.dpo, b.dpo}, {a.kto, b.kto}};
    for (const char* f : {"/consistency.json", "/pass_ratio.csv", "/summary.json"}) {
      files.emplace_back(a.stats_dir + f, b.stats_dir + f);
    }
    size_t same = 0;
    for (const auto& [x, y] : files) same += ReadFile(x) == ReadFile(y);
    return Check(same == files.size(),
                 fmt::format("{}/{} files byte-identical between parallelism 8 and 1", same,
                             files.size()));
  }

  Verdict MutationValidity() {
    auto solutions = testing::LoadFixtureSolutions();
    std::vector<std::string> positives;
    for (const auto& s : solutions) {
      if (s.solved) positives.insert(positives.end(), s.correct.begin(), s.correct.end());
    }
    Json checks = Json::array();
    size_t mutated = 0;
    for (uint64_t seed = 0; mutated < kMinMutations && seed < 10000; ++seed) {
      for (const auto& code : positives) {
        MutationConfig c;
        c.seed = seed;
        c.p = 0.3;
        MutationResult r = Mutate(code, c);
        if (r.applied.empty()) continue;
        ++mutated;
        checks.push_back({{"orig", code}, {"out", r.code}, {"identity", false}});
      }
    }
    for (const auto& code : positives) {
      MutationConfig c;
      c.p = 0.0;
      checks.push_back({{"orig", code}, {"out", Mutate(code, c).code}, {"identity", true}});
    }
    Json oracle = PythonAstOracle(checks);

    // Behavioral change, one mutant per solved task.
    std::vector<LabeledCandidate> lcs;
    std::vector<TestArtifact> tests;
    std::map<std::string, std::vector<std::string>> suites;
    for (const auto& s : solutions) {
      if (!s.solved) continue;
      LabeledCandidate lc;
      lc.candidate.instruction_id = s.instruction_id;
      lc.candidate.code = s.correct[0];
      lc.runnable = lc.passed_all = true;
      lcs.push_back(lc);
      for (size_t t = 0; t < s.tests.size(); ++t) {
        TestArtifact a;
        a.instruction_id = s.instruction_id;
        a.gen_index = static_cast<int>(t);
        a.test_code = s.tests[t];
        a.consistent = true;
        tests.push_back(a);
      }
      suites[s.instruction_id] = s.tests;
    }
    Sandbox sandbox(testing::FastSandbox(kReexecParallelism));
    MutationConfig mc;
    mc.seed = 17;
    SynthResult synth = SynthNegatives(lcs, mc, tests, &sandbox);
    std::vector<int> fails(synth.mutants.size());
    ParallelFor(synth.mutants.size(), kReexecParallelism, [&](size_t i) {
      const Mutant& m = synth.mutants[i];
      for (const auto& t : suites[m.candidate.instruction_id]) {
        if (!reexec_.Passes(m.candidate.code, t)) {
          fails[i] = 1;
          return;
        }
      }
    });
    size_t failing = std::count(fails.begin(), fails.end(), 1);
    double rate = synth.mutants.empty() ? 0.0 : static_cast<double>(failing) / synth.mutants.size();

    int64_t invalid = oracle.value("invalid", -1);
    int64_t not_identity = oracle.value("not_identity", -1);
    bool ok = mutated >= kMinMutations && invalid == 0 && not_identity == 0 &&
              !synth.mutants.empty() && rate >= kMinBehaviorChangeRate;
    return Check(ok, fmt::format("{} mutants, {} fail ast.parse; P=0 tree mismatches {}/{}; "
                                 "{}/{} emitted mutants fail a test on re-execution ({:.1f}%, "
                                 "need {:.0f}%), {} of {} positives skipped",
                                 mutated, invalid, not_identity, positives.size(), failing,
                                 synth.mutants.size(), 100.0 * rate, 100.0 * kMinBehaviorChangeRate,
                                 synth.stats.positives - synth.stats.emitted,
                                 synth.stats.positives));
  }

  Verdict Ablation() {
    const RunOutput& base = Main();
    RunOutput flagged = RunFixture(root_ + "/ablation",
                                   Json{{"preference", {{"include_unrunnable_negatives", true}}}},
                                   false);
    const Counters& a = base.report.counters;
    const Counters& b = flagged.report.counters;
    int64_t unrunnable = a.unrunnable_excluded;

    std::set<std::string> unrunnable_code;
    for (const auto& g : Groups(base.dir + "/work")) {
      for (const auto& c : g["candidates"]) {
        if (!c["runnable"].get<bool>()) unrunnable_code.insert(c["code"].get<std::string>());
      }
    }
    auto count_in = [&](const DatasetPaths& p) {
      size_t n = 0;
      for (const auto& r : Records(p.dpo)) n += unrunnable_code.count(r["rejected"].get<std::string>());
      for (const auto& r : Records(p.kto)) n += unrunnable_code.count(r["completion"].get<std::string>());
      return n;
    };
    size_t in_default = count_in(base.report.emitted[0]);
    size_t in_flagged = count_in(flagged.report.emitted[0]);
    bool ok = unrunnable > 0 && b.unrunnable_excluded == 0 && b.negative - a.negative == unrunnable &&
              a.positive == b.positive && a.unrunnable == b.unrunnable && in_default == 0 &&
              in_flagged > 0 && a.Balanced() && b.Balanced();
    return Check(ok, fmt::format("unrunnable {}; negatives {} -> {} (delta {}); positives {} -> {}; "
                                 "unrunnable completions in output {} -> {}",
                                 unrunnable, a.negative, b.negative, b.negative - a.negative,
                                 a.positive, b.positive, in_default, in_flagged));
  }

  Verdict KtoBalance() {
    auto records = Records(Main().report.emitted.at(0).kto);
    size_t desirable = 0;
    for (const auto& r : records) desirable += r["label"] == "desirable";
    size_t undesirable = records.size() - desirable;

    // Lopsided synthetic groups, both directions.
    bool synthetic_ok = true;
    for (int positives : {1, 9}) {
      InstructionGroup g{"x", "p", {}};
      for (int i = 0; i < 10; ++i) {
        LabeledCandidate lc;
        lc.candidate.instruction_id = "x";
        lc.candidate.candidate_id = i;
        lc.candidate.code = "c" + std::to_string(i);
        lc.runnable = true;
        lc.passed_all = i < positives;
        lc.per_test = {{"t", lc.passed_all ? ExecStatus::kPass : ExecStatus::kTestFailure}};
        g.candidates.push_back(lc);
      }
      PreferenceConfig pc;
      pc.kto_balance_ratio = 1.0;
      auto kto = BuildKto({g}, pc);
      size_t d = 0;
      for (const auto& r : kto) d += r.desirable;
      synthetic_ok = synthetic_ok && d * 2 == kto.size() && d > 0;
    }
    bool ok = desirable > 0 && desirable == undesirable && synthetic_ok;
    return Check(ok, fmt::format("fixture run {} desirable / {} undesirable; lopsided groups "
                                 "balanced: {}",
                                 desirable, undesirable, synthetic_ok));
  }

  Verdict TimeoutEnforcement() {
    SandboxConfig sc = testing::FastSandbox(1);
    sc.time_limit_seconds = kTimeoutLimitSeconds;
    Sandbox sandbox(sc);
    ExecutionOutcome o = sandbox.Execute(
        sandbox.MakeRequest(AssembleProgram("def f():\n    while True:\n        pass\n", "f()")));
    double limit = kTimeoutSlack * kTimeoutLimitSeconds;
    bool ok = o.status == ExecStatus::kTimeout && o.duration_seconds <= limit;
    return Check(ok, fmt::format("status {}, {:.2f}s (limit {:.1f}s)", StatusName(o.status),
                                 o.duration_seconds, limit));
  }

  Verdict OnlineLoop() {
    std::string dir = root_ + "/online";
    MakeDirs(dir);
    fs::copy_file(testing::FixtureDir() + "/fake_trainer.py", dir + "/fake_trainer.py",
                  fs::copy_options::overwrite_existing);
    Json patch = {
        {"corpus", {{"path", testing::FixtureDir() + "/data/instructions_20.jsonl"}}},
        {"pipeline",
         {{"chunk_size", 5},
          {"update_frequency", 2},
          {"trainer_hook", {"python3", "-S", "fake_trainer.py"}}}},
    };
    RunOutput run = RunFixture(dir, patch, true);
    auto calls = Records(dir + "/hook_calls.jsonl");
    const auto& emitted = run.report.emitted;
    if (calls.size() != 2 || emitted.size() != 2) {
      return Check(false, fmt::format("{} hook calls, {} rounds emitted", calls.size(),
                                      emitted.size()));
    }
    std::set<std::string> round_ids[2];
    for (int r = 0; r < 2; ++r) {
      auto a = Ids(Records(emitted[r].dpo));
      auto b = Ids(Records(emitted[r].kto));
      round_ids[r].insert(a.begin(), a.end());
      round_ids[r].insert(b.begin(), b.end());
    }
    size_t overlap = 0;
    for (const auto& id : round_ids[0]) overlap += round_ids[1].count(id);

    // Candidate records behind each round's datasets.
    std::set<std::string> policies[2];
    std::set<std::string> candidate_ids[2];
    for (int r = 0; r < 2; ++r) {
      Json summary = Json::parse(ReadFile(emitted[r].stats_dir + "/summary.json"));
      size_t begin = summary["chunks"]["begin"];
      size_t end = summary["chunks"]["end"];
      auto dirs = ChunkDirs(dir + "/work");
      for (size_t i = begin; i < end; ++i) {
        for (const auto& c : Records(dirs[i] + "/candidates.jsonl")) {
          policies[r].insert(c["sampling"]["policy_identifier"].get<std::string>());
          candidate_ids[r].insert(c["instruction_id"].get<std::string>());
        }
      }
    }
    bool covered = std::includes(candidate_ids[1].begin(), candidate_ids[1].end(),
                                 round_ids[1].begin(), round_ids[1].end());
    bool ok = overlap == 0 && !round_ids[1].empty() && covered &&
              policies[0] == std::set<std::string>{"policy-0"} &&
              policies[1] == std::set<std::string>{"policy-r1"} &&
              calls[0]["policy_id"] == "policy-0" && calls[1]["policy_id"] == "policy-r1" &&
              calls[0]["env_ok"] == true && calls[1]["env_ok"] == true;
    return Check(ok, fmt::format("2 hook calls; round overlap {} instructions; round policies "
                                 "[{}] then [{}]",
                                 overlap, fmt::join(policies[0], ","), fmt::join(policies[1], ",")));
  }

  Verdict ShimProtocol() {
    struct Case {
      const char* file;
      int code;
      const char* marker;
    };
    const Case cases[] = {{"pass.py", 0, "PLUM:PASS:"},
                          {"assert_fail.py", 10, "PLUM:TESTFAIL:"},
                          {"raise.py", 11, "PLUM:RUNTIME:"},
                          {"import_fail.py", 12, "PLUM:LOADFAIL:"}};
    int exact = 0;
    std::string detail;
    for (const auto& c : cases) {
      std::string err = root_ + "/shim_" + c.file + ".err";
      ProcessSpec spec;
      spec.argv = {"python3", "-S", PLUM_SHIM_SOURCE,
                   testing::FixtureDir() + "/shim/" + c.file};
      spec.env = {"PATH=/usr/bin:/bin"};
      spec.stderr_path = err;
      spec.timeout_seconds = 10;
      ProcessResult r = RunProcess(spec);
      std::string text = ReadFile(err);
      while (!text.empty() && text.back() == '\n') text.pop_back();
      std::string last = text.substr(text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1);
      bool ok = r.kind == ProcessResult::Kind::kExited && r.exit_code == c.code &&
                last.rfind(c.marker, 0) == 0;
      exact += ok;
      detail += fmt::format("{}{}->{}", detail.empty() ? "" : ", ", c.file, r.exit_code);
    }
    return Check(exact == 4, fmt::format("{}/4 exact ({})", exact, detail));
  }

 private:
  // ast.parse on every output; ast.dump equality where identity is expected.
  Json PythonAstOracle(const Json& checks) {
    static const char* kScript = R"(import ast, json, sys
items = json.load(open(sys.argv[1]))
invalid = not_identity = 0
for it in items:
    try:
        out = ast.parse(it["out"])
    except SyntaxError:
        invalid += 1
        continue
    if it["identity"] and ast.dump(out) != ast.dump(ast.parse(it["orig"])):
        not_identity += 1
json.dump({"checked": len(items), "invalid": invalid, "not_identity": not_identity}, sys.stdout)
)";
    std::string dir = root_ + "/ast_oracle";
    MakeDirs(dir);
    WriteFileAtomic(dir + "/check.py", kScript);
    WriteFileAtomic(dir + "/items.json", checks.dump());
    ProcessSpec spec;
    spec.argv = {"python3", "-S", dir + "/check.py", dir + "/items.json"};
    spec.env = {"PATH=/usr/bin:/bin"};
    spec.stdout_path = dir + "/result.json";
    spec.timeout_seconds = 120;
    ProcessResult r = RunProcess(spec);
    if (r.kind != ProcessResult::Kind::kExited || r.exit_code != 0) return Json::object();
    return Json::parse(ReadFile(dir + "/result.json"));
  }

  std::string root_;
  Reexecutor reexec_;
  std::optional<RunOutput> main_;
};

}  // namespace
}  // namespace plum

int main(int argc, char** argv) {
  using plum::Acceptance;
  using plum::Verdict;
  plum::testing::ScratchDir scratch;
  Acceptance acc(scratch.path());
  std::set<std::string> only(argv + 1, argv + argc);

  struct Criterion {
    const char* name;
    bool primary;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle_round_trip", true, [&] { return acc.OracleRoundTrip(); }},
      {"chosen_rejected_rule", true, [&] { return acc.ChosenRejectedRule(); }},
      {"no_positive_filtering", true, [&] { return acc.NoPositiveFiltering(); }},
      {"consistency_statistics", true, [&] { return acc.ConsistencyStatistics(); }},
      {"determinism", true, [&] { return acc.Determinism(); }},
      {"mutation_validity", true, [&] { return acc.MutationValidity(); }},
      {"ablation_unrunnable_negatives", true, [&] { return acc.Ablation(); }},
      {"kto_balance", true, [&] { return acc.KtoBalance(); }},
      {"timeout_enforcement", true, [&] { return acc.TimeoutEnforcement(); }},
      {"online_loop", true, [&] { return acc.OnlineLoop(); }},
      {"shim_protocol", false, [&] { return acc.ShimProtocol(); }},
  };
  bool all_primary = true;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::string line = fmt::format("{} [{}] {}: {}", v.pass ? "PASS" : "FAIL",
                                   c.primary ? "primary" : "secondary", c.name, v.detail);
    std::cout << line << std::endl;
    if (c.primary && !v.pass) all_primary = false;
  }
  return all_primary ? 0 : 1;
}
