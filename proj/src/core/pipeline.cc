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

#include "plum/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>

#include "plum/report.h"
#include "plum/util/parallel.h"
#include "plum/util/process.h"
#include "spdlog/sinks/basic_file_sink.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace plum {
namespace {

namespace fs = std::filesystem;

constexpr int kStateVersion = 1;

const Json& Section(const Json& root, const char* name) {
  static const Json kEmpty = Json::object();
  if (!root.contains(name)) return kEmpty;
  if (!root[name].is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
  return root[name];
}

std::string Numbered(const char* prefix, size_t n, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, n);
  return buf;
}

// Run log for the duration of a pipeline run; restores the previous
// default logger afterwards.
class RunLog {
 public:
  explicit RunLog(const std::string& path) : previous_(spdlog::default_logger()) {
    auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
    console->set_level(spdlog::level::info);
    auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>(path);
    file->set_level(spdlog::level::debug);
    auto logger = std::make_shared<spdlog::logger>("plum", spdlog::sinks_init_list{console, file});
    logger->set_level(spdlog::level::debug);
    logger->flush_on(spdlog::level::info);
    spdlog::set_default_logger(logger);
  }
  ~RunLog() {
    spdlog::default_logger()->flush();
    spdlog::set_default_logger(previous_);
  }
  RunLog(const RunLog&) = delete;
  RunLog& operator=(const RunLog&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

struct RunState {
  std::string mode;
  size_t corpus_size = 0;
  size_t chunk_size = 0;
  size_t chunk_cursor = 0;
  size_t round = 1;
  size_t round_start = 0;
  std::string status = "running";  // running | pending_hook | done
  std::string policy_identifier;
  std::vector<DatasetPaths> emitted;
  Counters counters;
};

Json ToJson(const DatasetPaths& p) {
  return Json{{"dpo", p.dpo}, {"kto", p.kto}, {"stats_dir", p.stats_dir}};
}

DatasetPaths PathsFromJson(const Json& j) {
  return {j.at("dpo").get<std::string>(), j.at("kto").get<std::string>(),
          j.at("stats_dir").get<std::string>()};
}

Json ToJson(const RunState& s) {
  Json j;
  j["version"] = kStateVersion;
  j["mode"] = s.mode;
  j["corpus_size"] = s.corpus_size;
  j["chunk_size"] = s.chunk_size;
  j["chunk_cursor"] = s.chunk_cursor;
  j["round"] = s.round;
  j["round_start"] = s.round_start;
  j["status"] = s.status;
  j["policy_identifier"] = s.policy_identifier;
  Json emitted = Json::array();
  for (const auto& p : s.emitted) emitted.push_back(ToJson(p));
  j["emitted"] = emitted;
  j["counters"] = ToJson(s.counters);
  return j;
}

RunState StateFromJson(const Json& j) {
  if (j.value("version", 0) != kStateVersion) throw PipelineAbort("unsupported state file version");
  RunState s;
  s.mode = j.at("mode").get<std::string>();
  s.corpus_size = j.at("corpus_size").get<size_t>();
  s.chunk_size = j.at("chunk_size").get<size_t>();
  s.chunk_cursor = j.at("chunk_cursor").get<size_t>();
  s.round = j.at("round").get<size_t>();
  s.round_start = j.at("round_start").get<size_t>();
  s.status = j.at("status").get<std::string>();
  s.policy_identifier = j.value("policy_identifier", "");
  for (const auto& p : j.at("emitted")) s.emitted.push_back(PathsFromJson(p));
  s.counters = CountersFromJson(j.at("counters"));
  return s;
}

std::vector<std::string> HookArgv(const Json& value, const std::string& base_dir) {
  std::vector<std::string> argv;
  if (value.is_null()) return argv;
  if (value.is_string()) {
    if (!value.get<std::string>().empty()) argv = {"/bin/sh", "-c", value.get<std::string>()};
    return argv;
  }
  argv = value.get<std::vector<std::string>>();
  if (!argv.empty() && argv[0].find('/') != std::string::npos) {
    argv[0] = ResolvePath(base_dir, argv[0]);
  }
  return argv;
}

void CheckSandboxHealth(const Counters& c, double threshold) {
  if (c.executions == 0) return;
  double rate = static_cast<double>(c.sandbox_errors) / static_cast<double>(c.executions);
  if (rate > threshold) {
    throw PipelineAbort("sandbox error rate " + std::to_string(rate) + " exceeds threshold " +
                        std::to_string(threshold));
  }
}

}  // namespace

// ---------------------------------------------------------------- config

PlumConfig LoadConfig(const std::string& path) {
  PlumConfig c;
  try {
    c.path = fs::absolute(path).lexically_normal().string();
    c.base_dir = fs::path(c.path).parent_path().string();
    Json root = Json::parse(ReadFile(c.path));
    if (!root.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> kSections = {
        "corpus", "testgen", "sampler", "sandbox", "preference", "mutation", "pipeline", "report"};
    for (const auto& [key, value] : root.items()) {
      if (!kSections.count(key)) throw ConfigError("unknown config section '" + key + "'");
    }

    const Json& corpus = Section(root, "corpus");
    if (corpus.contains("path")) c.corpus.path = ResolvePath(c.base_dir, corpus["path"]);
    c.corpus.load.source_tag = corpus.value("source_tag", "corpus");
    c.corpus.load.strict = corpus.value("strict", false);
    c.corpus.load.dedup = corpus.value("dedup", false);
    if (corpus.contains("subsample") && !corpus["subsample"].is_null()) {
      c.corpus.subsample = corpus["subsample"].get<size_t>();
    }
    c.corpus.subsample_seed = corpus.value("subsample_seed", uint64_t{0});

    c.testgen = GeneratorConfigFromJson(Section(root, "testgen"), c.base_dir);
    c.sampler = SamplingConfigFromJson(Section(root, "sampler"), c.base_dir);
    c.sandbox = SandboxConfigFromJson(Section(root, "sandbox"), c.base_dir);
    c.preference = PreferenceConfigFromJson(Section(root, "preference"));
    const Json& mutation = Section(root, "mutation");
    c.mutation_enabled = mutation.value("enabled", false);
    c.mutation = MutationConfigFromJson(mutation);

    const Json& pipeline = Section(root, "pipeline");
    PipelineOptions& p = c.pipeline;
    p.work_dir = ResolvePath(c.base_dir, pipeline.value("work_dir", p.work_dir));
    p.output_dir = ResolvePath(c.base_dir, pipeline.value("output_dir", p.output_dir));
    p.chunk_size = pipeline.value("chunk_size", p.chunk_size);
    p.update_frequency = pipeline.value("update_frequency", p.update_frequency);
    p.sandbox_error_threshold = pipeline.value("sandbox_error_threshold", p.sandbox_error_threshold);
    if (pipeline.contains("trainer_hook")) {
      p.trainer_hook = HookArgv(pipeline["trainer_hook"], c.base_dir);
    }
    p.hook_timeout_seconds = pipeline.value("hook_timeout_seconds", p.hook_timeout_seconds);
    p.hook_in_offline = pipeline.value("hook_in_offline", p.hook_in_offline);
    if (p.chunk_size == 0) throw ConfigError("pipeline.chunk_size must be >= 1");
    if (p.update_frequency == 0) throw ConfigError("pipeline.update_frequency must be >= 1");

    const Json& report = Section(root, "report");
    c.report.dataset_name = report.value("dataset_name", c.corpus.load.source_tag);
    c.report.histogram_bins = report.value("histogram_bins", c.report.histogram_bins);
    if (c.report.histogram_bins < 1) throw ConfigError("report.histogram_bins must be >= 1");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

// ---------------------------------------------------------------- counters

#define PLUM_COUNTER_FIELDS(X)                                                            \
  X(instructions) X(instructions_testgen_failed) X(instructions_no_tests)                  \
  X(instructions_sample_failed) X(instructions_sampled) X(instructions_dropped_no_positive) \
  X(instructions_dpo_no_negative) X(testgen_responses) X(testgen_parse_failures)           \
  X(artifacts) X(artifacts_consistent) X(candidates_requested) X(backend_shortfall)        \
  X(candidates_sampled) X(static_failures) X(smoke_failures) X(unrunnable) X(positive)     \
  X(negative) X(unrunnable_excluded) X(dropped_with_instruction) X(executions)             \
  X(sandbox_errors) X(synthetic_negatives)

Counters& Counters::operator+=(const Counters& o) {
#define PLUM_ADD(f) f += o.f;
  PLUM_COUNTER_FIELDS(PLUM_ADD)
#undef PLUM_ADD
  return *this;
}

bool Counters::Balanced() const {
  return candidates_sampled ==
             positive + negative + unrunnable_excluded + dropped_with_instruction &&
         candidates_sampled == candidates_requested - backend_shortfall;
}

Json ToJson(const Counters& c) {
  Json j;
#define PLUM_PUT(f) j[#f] = c.f;
  PLUM_COUNTER_FIELDS(PLUM_PUT)
#undef PLUM_PUT
  return j;
}

Counters CountersFromJson(const Json& j) {
  Counters c;
#define PLUM_GET(f) c.f = j.value(#f, int64_t{0});
  PLUM_COUNTER_FIELDS(PLUM_GET)
#undef PLUM_GET
  return c;
}

#undef PLUM_COUNTER_FIELDS

// ---------------------------------------------------------------- stages

TestStage GenerateAndFilter(const std::vector<Instruction>& instructions,
                            const GeneratorConfig& config, CompletionBackend& backend,
                            const Sandbox& sandbox) {
  std::vector<GenerateResult> results(instructions.size());
  std::vector<std::string> errors(instructions.size());
  ParallelFor(instructions.size(), config.max_in_flight, [&](size_t i) {
    try {
      results[i] = Generate(instructions[i], config, backend);
    } catch (const BackendUnavailable& e) {
      errors[i] = e.what();
    } catch (const StubMiss& e) {
      errors[i] = e.what();
    }
  });
  TestStage stage;
  std::vector<TestArtifact> artifacts;
  for (size_t i = 0; i < instructions.size(); ++i) {
    if (!errors[i].empty()) {
      spdlog::warn("testgen failed for {}: {}", instructions[i].id, errors[i]);
      stage.failed_instructions.push_back(instructions[i].id);
      continue;
    }
    stage.responses += results[i].responses;
    stage.parse_failures += results[i].parse_failures;
    for (auto& a : results[i].artifacts) artifacts.push_back(std::move(a));
  }
  stage.filter = FilterArtifacts(std::move(artifacts), sandbox);
  return stage;
}

SampleStage SampleInstructions(const std::vector<Instruction>& instructions,
                               const std::vector<TestArtifact>& tests,
                               const SamplingConfig& config, CompletionBackend& backend) {
  std::map<std::string, std::vector<TestArtifact>> by_id;
  for (const auto& t : tests) by_id[t.instruction_id].push_back(t);
  std::vector<std::string> prompts(instructions.size());
  for (size_t i = 0; i < instructions.size(); ++i) {
    auto it = by_id.find(instructions[i].id);
    std::string starter = it == by_id.end() ? "" : StarterFor(it->second);
    prompts[i] = BuildPolicyPrompt(instructions[i], starter, config);
  }
  std::vector<std::vector<CandidateSolution>> sampled(instructions.size());
  std::vector<std::string> errors(instructions.size());
  ParallelFor(instructions.size(), config.max_in_flight, [&](size_t i) {
    try {
      sampled[i] = Sample(instructions[i], prompts[i], config, backend);
    } catch (const BackendUnavailable& e) {
      errors[i] = e.what();
    } catch (const StubMiss& e) {
      errors[i] = e.what();
    }
  });
  SampleStage stage;
  for (size_t i = 0; i < instructions.size(); ++i) {
    if (!errors[i].empty()) {
      spdlog::warn("sampling failed for {}: {}", instructions[i].id, errors[i]);
      stage.failed_instructions.push_back(instructions[i].id);
      continue;
    }
    stage.requested += config.k;
    stage.prompts.emplace_back(instructions[i].id, prompts[i]);
    for (auto& c : sampled[i]) stage.candidates.push_back(std::move(c));
  }
  return stage;
}

GradeStage GradeCandidates(const std::vector<CandidateSolution>& candidates,
                           const std::vector<TestArtifact>& tests, const Sandbox& sandbox) {
  GradeStage stage;
  size_t n = candidates.size();
  std::vector<bool> runnable(n, false);
  std::vector<std::string> reasons(n);

  std::vector<StaticCheckResult> checks(n);
  int check_parallelism = sandbox.config().analyzer.empty() ? 1 : sandbox.config().parallelism;
  ParallelFor(n, check_parallelism, [&](size_t i) { checks[i] = sandbox.Check(candidates[i].code); });

  std::vector<size_t> smoke_index;
  std::vector<ExecutionRequest> smoke;
  for (size_t i = 0; i < n; ++i) {
    if (!checks[i].ok) {
      ++stage.static_failures;
      reasons[i] = "static: " + checks[i].diagnostic;
      continue;
    }
    smoke_index.push_back(i);
    smoke.push_back(sandbox.MakeRequest(candidates[i].code, /*smoke=*/true));
  }
  std::vector<ExecutionOutcome> smoke_out = sandbox.ExecuteAll(smoke);
  for (size_t k = 0; k < smoke_index.size(); ++k) {
    size_t i = smoke_index[k];
    ++stage.executions;
    if (smoke_out[k].status == ExecStatus::kSandboxError) ++stage.sandbox_errors;
    if (smoke_out[k].status == ExecStatus::kPass) {
      runnable[i] = true;
    } else {
      ++stage.smoke_failures;
      reasons[i] = "smoke: " + std::string(StatusName(smoke_out[k].status)) + ": " +
                   smoke_out[k].exit_detail;
    }
  }

  std::map<std::string, std::vector<const TestArtifact*>> by_id;
  for (const auto& t : tests) by_id[t.instruction_id].push_back(&t);
  std::vector<MatrixJob> jobs;
  for (size_t i = 0; i < n; ++i) {
    if (!runnable[i]) continue;
    auto it = by_id.find(candidates[i].instruction_id);
    if (it == by_id.end()) continue;
    for (const TestArtifact* t : it->second) {
      jobs.push_back({CandidateKey(candidates[i]), TestKey(*t),
                      sandbox.MakeRequest(AssembleProgram(candidates[i].code, t->test_code))});
    }
  }
  OutcomeMap outcomes = sandbox.RunMatrix(jobs);
  for (const auto& [key, outcome] : outcomes) {
    if (outcome.status == ExecStatus::kSkipped) continue;
    ++stage.executions;
    if (outcome.status == ExecStatus::kSandboxError) ++stage.sandbox_errors;
  }
  stage.labeled = Label(candidates, runnable, reasons, tests, outcomes);
  return stage;
}

std::vector<InstructionGroup> GroupByInstruction(
    const std::vector<LabeledCandidate>& labeled,
    const std::vector<std::pair<std::string, std::string>>& prompts) {
  std::vector<InstructionGroup> groups;
  std::map<std::string, size_t> index;
  for (const auto& [id, prompt] : prompts) {
    if (!index.emplace(id, groups.size()).second) {
      throw std::invalid_argument("duplicate instruction " + id);
    }
    groups.push_back({id, prompt, {}});
  }
  for (const auto& c : labeled) {
    auto it = index.find(c.candidate.instruction_id);
    if (it == index.end()) {
      throw std::invalid_argument("candidate for unknown instruction " + c.candidate.instruction_id);
    }
    groups[it->second].candidates.push_back(c);
  }
  return groups;
}

Json ToJson(const InstructionGroup& g) {
  Json j;
  j["instruction_id"] = g.instruction_id;
  j["prompt"] = g.prompt;
  Json cands = Json::array();
  for (const auto& c : g.candidates) cands.push_back(ToJson(c));
  j["candidates"] = cands;
  return j;
}

InstructionGroup GroupFromJson(const Json& j) {
  InstructionGroup g;
  g.instruction_id = j.at("instruction_id").get<std::string>();
  g.prompt = j.at("prompt").get<std::string>();
  for (const auto& c : j.at("candidates")) g.candidates.push_back(LabeledFromJson(c));
  return g;
}

// ---------------------------------------------------------------- runner

namespace {

class Runner {
 public:
  Runner(std::string config_path, std::optional<size_t> budget)
      : config_path_(std::move(config_path)), budget_(budget) {}

  RunReport Run(bool online) {
    config_ = LoadConfig(config_path_);
    MakeDirs(config_.pipeline.work_dir);
    MakeDirs(config_.pipeline.output_dir);
    RunLog log(config_.pipeline.work_dir + "/run.log");
    online_ = online;

    LoadResult loaded = LoadInstructions(config_.corpus.path, config_.corpus.load);
    for (const auto& w : loaded.warnings) spdlog::warn("corpus: {}", w);
    std::vector<Instruction> instructions = std::move(loaded.instructions);
    if (config_.corpus.subsample) {
      instructions = Subsample(instructions, *config_.corpus.subsample, config_.corpus.subsample_seed);
    }
    chunks_ = MakeChunks(instructions, config_.pipeline.chunk_size);
    spdlog::info("{} run: {} instructions in {} chunks of {}", online ? "online" : "offline",
                 instructions.size(), chunks_.size(), config_.pipeline.chunk_size);

    LoadOrInitState(instructions.size());
    RunReport report;
    if (state_.status == "done") {
      spdlog::info("run already complete; nothing to do");
      return Finish(report);
    }

    sandbox_ = std::make_unique<Sandbox>(config_.sandbox);
    testgen_backend_ = MakeBackend(config_.testgen.backend, "responses");
    policy_backend_ = MakeBackend(config_.sampler.backend, "completions");
    if (state_.policy_identifier.empty()) state_.policy_identifier = config_.sampler.policy_identifier;

    size_t processed = 0;
    while (true) {
      if (online_) {
        if (state_.status == "pending_hook") {
          RunHookAndAdvance();
        } else if (RoundDue()) {
          EmitRound();
          RunHookAndAdvance();
        }
      }
      if (state_.chunk_cursor >= chunks_.size()) break;
      if (budget_ && processed >= *budget_) {
        spdlog::info("chunk budget reached; stopping with state saved");
        return Finish(report);
      }
      ProcessChunk(chunks_[state_.chunk_cursor]);
      ++state_.chunk_cursor;
      ++processed;
      SaveState();
    }

    if (!online_) {
      DatasetPaths paths = Emit(0, chunks_.size(), config_.pipeline.output_dir, std::nullopt);
      state_.emitted = {paths};
      SaveState();
      if (config_.pipeline.hook_in_offline && !config_.pipeline.trainer_hook.empty()) {
        InvokeHook(1, paths);
      }
    } else {
      WriteOnlineTotals();
    }
    state_.status = "done";
    SaveState();
    report.finished = true;
    return Finish(report);
  }

 private:
  RunReport Finish(RunReport report) {
    report.emitted = state_.emitted;
    report.counters = state_.counters;
    report.rounds_completed = static_cast<int>(online_ ? state_.round - 1 : (report.finished ? 1 : 0));
    if (state_.status == "done") report.finished = true;
    return report;
  }

  std::string StatePath() const { return config_.pipeline.work_dir + "/state.json"; }

  std::string ChunkDir(size_t index) const {
    return config_.pipeline.work_dir + "/chunks/" + Numbered("chunk_", index, 4);
  }

  void LoadOrInitState(size_t corpus_size) {
    std::string mode = online_ ? "online" : "offline";
    if (FileExists(StatePath())) {
      state_ = StateFromJson(Json::parse(ReadFile(StatePath())));
      if (state_.mode != mode || state_.corpus_size != corpus_size ||
          state_.chunk_size != config_.pipeline.chunk_size) {
        throw PipelineAbort("state file " + StatePath() +
                            " belongs to a different run; remove the work dir to start over");
      }
      spdlog::info("resuming at chunk {} (round {}, status {})", state_.chunk_cursor, state_.round,
                   state_.status);
      return;
    }
    state_ = RunState{};
    state_.mode = mode;
    state_.corpus_size = corpus_size;
    state_.chunk_size = config_.pipeline.chunk_size;
    SaveState();
  }

  void SaveState() { WriteFileAtomic(StatePath(), ToJson(state_).dump(2) + "\n"); }

  bool RoundDue() const {
    size_t pending = state_.chunk_cursor - state_.round_start;
    if (pending == 0) return false;
    return pending >= config_.pipeline.update_frequency || state_.chunk_cursor >= chunks_.size();
  }

  // ---- one chunk

  TestStage CachedTests(const Chunk& chunk, const std::string& dir) {
    std::string marker = dir + "/testgen.json";
    TestStage stage;
    if (FileExists(marker)) {
      Json meta = Json::parse(ReadFile(marker));
      std::vector<TestArtifact> artifacts;
      for (const auto& r : ReadJsonl(dir + "/test_artifacts.jsonl")) {
        artifacts.push_back(TestArtifactFromJson(r.value));
      }
      stage.responses = meta.at("responses").get<int64_t>();
      stage.parse_failures = meta.at("parse_failures").get<int64_t>();
      stage.failed_instructions = meta.at("failed_instructions").get<std::vector<std::string>>();
      stage.filter.stats.total = static_cast<int64_t>(artifacts.size());
      for (auto& a : artifacts) {
        if (a.consistent.value_or(false)) {
          ++stage.filter.stats.passed;
          stage.filter.kept.push_back(a);
        }
      }
      stage.filter.artifacts = std::move(artifacts);
      spdlog::info("chunk {}: reusing cached tests", chunk.index);
      cached_tests_ = true;
      return stage;
    }
    cached_tests_ = false;
    stage = GenerateAndFilter(chunk.instructions, config_.testgen, *testgen_backend_, *sandbox_);
    WriteConsistencyOutputs(dir, stage.filter);
    Json meta;
    meta["responses"] = stage.responses;
    meta["parse_failures"] = stage.parse_failures;
    meta["failed_instructions"] = stage.failed_instructions;
    meta["sandbox_errors"] = stage.filter.sandbox_errors;
    WriteFileAtomic(marker, meta.dump(2) + "\n");
    return stage;
  }

  void ProcessChunk(const Chunk& chunk) {
    std::string dir = ChunkDir(chunk.index);
    MakeDirs(dir);
    Counters c;
    c.instructions = static_cast<int64_t>(chunk.instructions.size());

    TestStage tests = CachedTests(chunk, dir);
    c.instructions_testgen_failed = static_cast<int64_t>(tests.failed_instructions.size());
    c.testgen_responses = tests.responses;
    c.testgen_parse_failures = tests.parse_failures;
    c.artifacts = tests.filter.stats.total;
    c.artifacts_consistent = tests.filter.stats.passed;
    if (!cached_tests_) {
      c.executions += tests.filter.stats.total;
      c.sandbox_errors += tests.filter.sandbox_errors;
    }

    std::set<std::string> failed(tests.failed_instructions.begin(), tests.failed_instructions.end());
    std::set<std::string> with_tests;
    for (const auto& a : tests.filter.kept) with_tests.insert(a.instruction_id);
    std::vector<Instruction> to_sample;
    for (const auto& ins : chunk.instructions) {
      if (failed.count(ins.id)) continue;
      if (!with_tests.count(ins.id)) {
        ++c.instructions_no_tests;
        continue;
      }
      to_sample.push_back(ins);
    }

    SampleStage sampled =
        SampleInstructions(to_sample, tests.filter.kept, config_.sampler, *policy_backend_);
    c.instructions_sample_failed = static_cast<int64_t>(sampled.failed_instructions.size());
    c.instructions_sampled = static_cast<int64_t>(sampled.prompts.size());
    c.candidates_requested = sampled.requested;
    c.candidates_sampled = static_cast<int64_t>(sampled.candidates.size());
    c.backend_shortfall = c.candidates_requested - c.candidates_sampled;
    {
      std::vector<Json> rows;
      for (const auto& cand : sampled.candidates) rows.push_back(ToJson(cand));
      WriteJsonl(dir + "/candidates.jsonl", rows);
    }

    GradeStage graded = GradeCandidates(sampled.candidates, tests.filter.kept, *sandbox_);
    c.static_failures = graded.static_failures;
    c.smoke_failures = graded.smoke_failures;
    c.unrunnable = graded.static_failures + graded.smoke_failures;
    c.executions += graded.executions;
    c.sandbox_errors += graded.sandbox_errors;

    std::vector<InstructionGroup> groups = GroupByInstruction(graded.labeled, sampled.prompts);
    bool include_unrunnable = config_.preference.include_unrunnable_negatives;
    for (const auto& g : groups) {
      size_t pos = CountPositives(g);
      if (pos == 0) {
        ++c.instructions_dropped_no_positive;
        c.dropped_with_instruction += static_cast<int64_t>(g.candidates.size());
        continue;
      }
      c.positive += static_cast<int64_t>(pos);
      c.negative += static_cast<int64_t>(CountNegatives(g, include_unrunnable));
      if (!include_unrunnable) c.unrunnable_excluded += static_cast<int64_t>(CountUnrunnable(g));
    }
    if (!c.Balanced()) {
      throw std::logic_error("chunk " + std::to_string(chunk.index) + " counters do not balance");
    }

    if (config_.mutation_enabled) AddSyntheticNegatives(groups, tests.filter.kept, dir, c);
    for (const auto& g : groups) {
      if (CountPositives(g) > 0 && CountNegatives(g, include_unrunnable) == 0) {
        ++c.instructions_dpo_no_negative;
      }
    }

    Counters total = state_.counters;
    total += c;
    CheckSandboxHealth(total, config_.pipeline.sandbox_error_threshold);

    std::vector<Json> rows;
    for (const auto& g : groups) rows.push_back(ToJson(g));
    WriteJsonl(dir + "/groups.jsonl", rows);
    WriteFileAtomic(dir + "/counters.json", ToJson(c).dump(2) + "\n");
    state_.counters = total;
    spdlog::info("chunk {}: {} sampled, +{} / -{} / {} unrunnable excluded / {} dropped",
                 chunk.index, c.candidates_sampled, c.positive, c.negative, c.unrunnable_excluded,
                 c.dropped_with_instruction);
  }

  void AddSyntheticNegatives(std::vector<InstructionGroup>& groups,
                             const std::vector<TestArtifact>& tests, const std::string& dir,
                             Counters& c) {
    std::vector<LabeledCandidate> positives;
    for (const auto& g : groups) {
      for (const auto& cand : g.candidates) {
        if (IsPositive(cand)) positives.push_back(cand);
      }
    }
    SynthResult synth = SynthNegatives(positives, config_.mutation, tests, sandbox_.get());
    c.synthetic_negatives = static_cast<int64_t>(synth.stats.emitted);
    c.sandbox_errors += static_cast<int64_t>(synth.stats.sandbox_errors);
    std::map<std::string, InstructionGroup*> by_id;
    for (auto& g : groups) by_id[g.instruction_id] = &g;
    std::vector<Json> rows;
    for (const auto& m : synth.mutants) {
      rows.push_back(ToJson(m));
      InstructionGroup* g = by_id.at(m.candidate.instruction_id);
      LabeledCandidate lc;
      lc.candidate = m.candidate;
      lc.candidate.candidate_id = config_.sampler.k + m.candidate.candidate_id;
      lc.runnable = true;
      lc.passed_all = false;
      g->candidates.push_back(std::move(lc));
    }
    WriteJsonl(dir + "/mutants.jsonl", rows);
    WriteFileAtomic(dir + "/mutation_stats.json", ToJson(synth.stats).dump(2) + "\n");
  }

  // ---- emission

  std::vector<InstructionGroup> LoadGroups(size_t begin, size_t end) const {
    std::vector<InstructionGroup> groups;
    for (size_t i = begin; i < end; ++i) {
      for (const auto& r : ReadJsonl(ChunkDir(i) + "/groups.jsonl")) {
        groups.push_back(GroupFromJson(r.value));
      }
    }
    return groups;
  }

  ConsistencyStats LoadConsistency(size_t begin, size_t end) const {
    ConsistencyStats s;
    for (size_t i = begin; i < end; ++i) {
      s += ConsistencyStatsFromJson(Json::parse(ReadFile(ChunkDir(i) + "/consistency_stats.json")));
    }
    return s;
  }

  Counters LoadCounters(size_t begin, size_t end) const {
    Counters c;
    for (size_t i = begin; i < end; ++i) {
      c += CountersFromJson(Json::parse(ReadFile(ChunkDir(i) + "/counters.json")));
    }
    return c;
  }

  DatasetPaths Emit(size_t begin, size_t end, const std::string& dir, std::optional<size_t> round) {
    MakeDirs(dir);
    std::vector<InstructionGroup> groups = LoadGroups(begin, end);
    FilteredGroups filtered = FilterNoPositive(groups, config_.preference);
    DpoBuild dpo = BuildDpo(filtered.dpo, config_.preference);
    std::vector<KtoRecord> kto = BuildKto(filtered.kto, config_.preference);
    DatasetPaths paths{dir + "/dpo.jsonl", dir + "/kto.jsonl", dir + "/stats"};
    WriteDpo(paths.dpo, dpo.pairs);
    WriteKto(paths.kto, kto);

    std::set<std::string> policies;
    for (const auto& g : groups) {
      for (const auto& c : g.candidates) policies.insert(c.candidate.policy_identifier);
    }
    Json extra;
    if (round) extra["round"] = *round;
    extra["chunks"] = Json{{"begin", begin}, {"end", end}};
    extra["policy_identifiers"] = policies;
    extra["counters"] = ToJson(LoadCounters(begin, end));
    extra["dpo_identical_skipped"] = dpo.identical_skipped;
    WriteStatsDir(paths.stats_dir, {{config_.report.dataset_name, LoadConsistency(begin, end)}},
                  MakeHistogram(groups, config_.report.histogram_bins),
                  SummarizeDatasets(paths.dpo, paths.kto), extra);
    spdlog::info("wrote {} dpo pairs and {} kto records to {}", dpo.pairs.size(), kto.size(), dir);
    return paths;
  }

  void EmitRound() {
    std::string dir = config_.pipeline.output_dir + "/" + Numbered("round_", state_.round, 3);
    DatasetPaths paths = Emit(state_.round_start, state_.chunk_cursor, dir, state_.round);
    state_.emitted.push_back(paths);
    state_.status = "pending_hook";
    SaveState();
  }

  void RunHookAndAdvance() {
    if (!config_.pipeline.trainer_hook.empty()) {
      InvokeHook(state_.round, state_.emitted.back());
      SamplingConfig reloaded = LoadConfig(config_path_).sampler;
      if (reloaded.policy_identifier == state_.policy_identifier) {
        spdlog::warn("policy_identifier unchanged after round {}: {}", state_.round,
                     reloaded.policy_identifier);
      }
      config_.sampler = reloaded;
      policy_backend_ = MakeBackend(config_.sampler.backend, "completions");
    }
    state_.policy_identifier = config_.sampler.policy_identifier;
    ++state_.round;
    state_.round_start = state_.chunk_cursor;
    state_.status = "running";
    SaveState();
  }

  void InvokeHook(size_t round, const DatasetPaths& paths) {
    std::string log_path = config_.pipeline.work_dir + "/" + Numbered("hook_round_", round, 3) + ".log";
    ProcessSpec spec;
    spec.argv = config_.pipeline.trainer_hook;
    std::string policy = state_.policy_identifier;
    for (std::string arg : {std::string("--round"), std::to_string(round), std::string("--dpo"),
                            paths.dpo, std::string("--kto"), paths.kto, std::string("--policy-id"),
                            policy, std::string("--config"), config_.path}) {
      spec.argv.push_back(arg);
    }
    spec.env = {"PLUM_ROUND=" + std::to_string(round), "PLUM_DPO_PATH=" + paths.dpo,
                "PLUM_KTO_PATH=" + paths.kto, "PLUM_POLICY_ID=" + policy,
                "PLUM_CONFIG=" + config_.path};
    spec.inherit_env = true;
    spec.cwd = config_.base_dir;
    spec.stdout_path = log_path;
    spec.stderr_path = log_path;
    spec.timeout_seconds = config_.pipeline.hook_timeout_seconds;
    spdlog::info("round {}: invoking trainer hook", round);
    ProcessResult r = RunProcess(spec);
    std::istringstream out(FileExists(log_path) ? ReadFile(log_path) : "");
    for (std::string line; std::getline(out, line);) spdlog::info("[hook] {}", line);
    if (r.kind != ProcessResult::Kind::kExited || r.exit_code != 0) {
      throw PipelineAbort("trainer hook failed in round " + std::to_string(round) + ": " +
                          DescribeResult(r));
    }
  }

  void WriteOnlineTotals() {
    std::vector<InstructionGroup> groups = LoadGroups(0, chunks_.size());
    DatasetSummary total;
    for (const auto& p : state_.emitted) {
      DatasetSummary s = SummarizeDatasets(p.dpo, p.kto);
      total.pairs += s.pairs;
      total.kto_records += s.kto_records;
      total.desirable += s.desirable;
      total.undesirable += s.undesirable;
      total.dpo_instructions += s.dpo_instructions;
      total.kto_instructions += s.kto_instructions;
      total.distinct_instructions += s.distinct_instructions;
    }
    Json extra;
    extra["rounds"] = state_.emitted.size();
    extra["counters"] = ToJson(state_.counters);
    WriteStatsDir(config_.pipeline.output_dir + "/stats",
                  {{config_.report.dataset_name, LoadConsistency(0, chunks_.size())}},
                  MakeHistogram(groups, config_.report.histogram_bins), total, extra);
  }

  std::string config_path_;
  std::optional<size_t> budget_;
  PlumConfig config_;
  bool online_ = false;
  bool cached_tests_ = false;
  std::vector<Chunk> chunks_;
  RunState state_;
  std::unique_ptr<Sandbox> sandbox_;
  std::unique_ptr<CompletionBackend> testgen_backend_;
  std::unique_ptr<CompletionBackend> policy_backend_;
};

}  // namespace

Pipeline::Pipeline(std::string config_path) : config_path_(std::move(config_path)) {}

RunReport Pipeline::RunOffline() { return Run(false); }
RunReport Pipeline::RunOnline() { return Run(true); }

RunReport Pipeline::Run(bool online) {
  Runner runner(config_path_, chunk_budget_);
  return runner.Run(online);
}

}  // namespace plum
