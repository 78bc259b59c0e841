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

// plum: command-line front end for the pipeline and its stages.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plum/pipeline.h"
#include "plum/report.h"
#include "spdlog/spdlog.h"

namespace plum {
namespace {

std::vector<Instruction> ReadInstructions(const PlumConfig& config, const std::string& override) {
  std::string path = override.empty() ? config.corpus.path : override;
  LoadResult loaded = LoadInstructions(path, config.corpus.load);
  for (const auto& w : loaded.warnings) spdlog::warn("corpus: {}", w);
  if (config.corpus.subsample) {
    return Subsample(loaded.instructions, *config.corpus.subsample, config.corpus.subsample_seed);
  }
  return loaded.instructions;
}

std::vector<TestArtifact> ReadArtifacts(const std::string& path, bool consistent_only) {
  std::vector<TestArtifact> out;
  for (const auto& r : ReadJsonl(path)) {
    TestArtifact a = TestArtifactFromJson(r.value);
    if (consistent_only && !a.consistent.value_or(false)) continue;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<CandidateSolution> ReadCandidates(const std::string& path) {
  std::vector<CandidateSolution> out;
  for (const auto& r : ReadJsonl(path)) out.push_back(CandidateFromJson(r.value));
  return out;
}

std::vector<InstructionGroup> ReadGroups(const std::string& path) {
  std::vector<InstructionGroup> out;
  for (const auto& r : ReadJsonl(path)) out.push_back(GroupFromJson(r.value));
  return out;
}

int PrintRun(const RunReport& report) {
  for (const auto& p : report.emitted) std::cout << p.dpo << "\n" << p.kto << "\n";
  std::cout << ToJson(report.counters).dump(2) << "\n";
  return report.finished ? 0 : 3;
}

int Main(int argc, char** argv) {
  CLI::App app{"plum: execution-graded preference data for code models"};
  app.require_subcommand(1);
  std::string config_path;

  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  std::string mode = "offline";
  std::optional<size_t> budget;
  run->add_option("--mode", mode)->check(CLI::IsMember({"offline", "online"}));
  run->add_option("--config", config_path)->required();
  run->add_option("--max-chunks", budget, "Stop after this many chunks (resumable)");

  auto* gen = app.add_subcommand("gen-tests", "Generate test artifacts (unfiltered)");
  std::string in_path, out_path, tests_path, prompts_path, out_dir, dpo_path, kto_path, groups_path;
  gen->add_option("--config", config_path)->required();
  gen->add_option("--instructions", in_path, "Defaults to corpus.path");
  gen->add_option("--out", out_path)->required();

  auto* filter = app.add_subcommand("filter-consistency", "Run each test against its reference");
  filter->add_option("--config", config_path)->required();
  filter->add_option("--input", in_path)->required();
  filter->add_option("--out-dir", out_dir)->required();

  auto* sample = app.add_subcommand("sample", "Sample candidate solutions");
  sample->add_option("--config", config_path)->required();
  sample->add_option("--instructions", in_path, "Defaults to corpus.path");
  sample->add_option("--tests", tests_path, "Filtered test_artifacts.jsonl")->required();
  sample->add_option("--out", out_path)->required();
  sample->add_option("--prompts-out", prompts_path);

  auto* grade = app.add_subcommand("grade", "Execute candidates against tests and label them");
  grade->add_option("--config", config_path)->required();
  grade->add_option("--candidates", in_path)->required();
  grade->add_option("--tests", tests_path)->required();
  grade->add_option("--prompts", prompts_path, "From `sample --prompts-out`");
  grade->add_option("--out", out_path)->required();

  auto* build = app.add_subcommand("build", "Build a preference dataset from labeled groups");
  std::string format;
  build->add_option("format", format)->required()->check(CLI::IsMember({"dpo", "kto"}));
  build->add_option("--config", config_path)->required();
  build->add_option("--groups", groups_path)->required();
  build->add_option("--out", out_path)->required();

  auto* mutate = app.add_subcommand("mutate", "Rewrite candidates into likely-wrong variants");
  mutate->add_option("--config", config_path)->required();
  mutate->add_option("--input", in_path)->required();
  mutate->add_option("--out", out_path)->required();

  auto* stats = app.add_subcommand("stats", "Write a stats directory and print the table");
  stats->add_option("--config", config_path)->required();
  stats->add_option("--artifacts", tests_path, "test_artifacts.jsonl with verdicts");
  stats->add_option("--groups", groups_path);
  stats->add_option("--dpo", dpo_path);
  stats->add_option("--kto", kto_path);
  stats->add_option("--out-dir", out_dir)->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    Pipeline pipeline(config_path);
    pipeline.set_chunk_budget(budget);
    return PrintRun(mode == "online" ? pipeline.RunOnline() : pipeline.RunOffline());
  }

  PlumConfig config = LoadConfig(config_path);

  if (gen->parsed()) {
    std::vector<Instruction> instructions = ReadInstructions(config, in_path);
    auto backend = MakeBackend(config.testgen.backend, "responses");
    std::vector<GenerateResult> results = GenerateAll(instructions, config.testgen, *backend);
    std::vector<Json> rows;
    size_t failures = 0;
    for (const auto& r : results) {
      failures += r.parse_failures;
      for (const auto& a : r.artifacts) rows.push_back(ToJson(a));
    }
    WriteJsonl(out_path, rows);
    spdlog::info("{} artifacts, {} parse failures", rows.size(), failures);
    return 0;
  }

  if (filter->parsed()) {
    Sandbox sandbox(config.sandbox);
    FilterResult result = FilterArtifacts(ReadArtifacts(in_path, false), sandbox);
    WriteConsistencyOutputs(out_dir, result);
    std::cout << ConsistencyTable({{config.report.dataset_name, result.stats}});
    return 0;
  }

  if (sample->parsed()) {
    std::vector<Instruction> instructions = ReadInstructions(config, in_path);
    std::vector<TestArtifact> tests = ReadArtifacts(tests_path, true);
    std::set<std::string> with_tests;
    for (const auto& t : tests) with_tests.insert(t.instruction_id);
    std::vector<Instruction> keep;
    for (auto& ins : instructions) {
      if (with_tests.count(ins.id)) keep.push_back(std::move(ins));
    }
    auto backend = MakeBackend(config.sampler.backend, "completions");
    SampleStage stage = SampleInstructions(keep, tests, config.sampler, *backend);
    std::vector<Json> rows;
    for (const auto& c : stage.candidates) rows.push_back(ToJson(c));
    WriteJsonl(out_path, rows);
    if (!prompts_path.empty()) {
      std::vector<Json> prompts;
      for (const auto& [id, prompt] : stage.prompts) {
        prompts.push_back(Json{{"instruction_id", id}, {"prompt", prompt}});
      }
      WriteJsonl(prompts_path, prompts);
    }
    return 0;
  }

  if (grade->parsed()) {
    Sandbox sandbox(config.sandbox);
    std::vector<CandidateSolution> candidates = ReadCandidates(in_path);
    GradeStage stage = GradeCandidates(candidates, ReadArtifacts(tests_path, true), sandbox);
    std::vector<std::pair<std::string, std::string>> prompts;
    if (!prompts_path.empty()) {
      for (const auto& r : ReadJsonl(prompts_path)) {
        prompts.emplace_back(r.value.at("instruction_id").get<std::string>(),
                             r.value.at("prompt").get<std::string>());
      }
    } else {
      std::set<std::string> seen;
      for (const auto& c : candidates) {
        if (seen.insert(c.instruction_id).second) prompts.emplace_back(c.instruction_id, "");
      }
    }
    std::vector<Json> rows;
    for (const auto& g : GroupByInstruction(stage.labeled, prompts)) rows.push_back(ToJson(g));
    WriteJsonl(out_path, rows);
    spdlog::info("{} executions, {} static failures, {} smoke failures", stage.executions,
                 stage.static_failures, stage.smoke_failures);
    return 0;
  }

  if (build->parsed()) {
    FilteredGroups filtered = FilterNoPositive(ReadGroups(groups_path), config.preference);
    if (format == "dpo") {
      DpoBuild dpo = BuildDpo(filtered.dpo, config.preference);
      WriteDpo(out_path, dpo.pairs);
      spdlog::info("{} pairs", dpo.pairs.size());
    } else {
      std::vector<KtoRecord> kto = BuildKto(filtered.kto, config.preference);
      WriteKto(out_path, kto);
      spdlog::info("{} records", kto.size());
    }
    return 0;
  }

  if (mutate->parsed()) {
    std::vector<Json> rows;
    size_t skipped = 0;
    for (const auto& c : ReadCandidates(in_path)) {
      MutationResult r;
      try {
        r = Mutate(c.code, config.mutation);
      } catch (const UnparseableInput&) {
        ++skipped;
        continue;
      }
      if (!r.valid || r.applied.empty()) {
        ++skipped;
        continue;
      }
      Mutant m{c, r.applied, 1};
      m.candidate.code = r.code;
      rows.push_back(ToJson(m));
    }
    WriteJsonl(out_path, rows);
    spdlog::info("{} mutants, {} skipped", rows.size(), skipped);
    return 0;
  }

  if (stats->parsed()) {
    ConsistencyStats cs;
    if (!tests_path.empty()) {
      for (const auto& a : ReadArtifacts(tests_path, false)) {
        ++cs.total;
        if (a.consistent.value_or(false)) ++cs.passed;
      }
    }
    std::vector<ConsistencyRow> rows = {{config.report.dataset_name, cs}};
    std::vector<InstructionGroup> groups;
    if (!groups_path.empty()) groups = ReadGroups(groups_path);
    WriteStatsDir(out_dir, rows, MakeHistogram(groups, config.report.histogram_bins),
                  SummarizeDatasets(dpo_path, kto_path), Json::object());
    std::cout << ConsistencyTable(rows);
    return 0;
  }
  return 1;
}

}  // namespace
}  // namespace plum

int main(int argc, char** argv) {
  try {
    return plum::Main(argc, argv);
  } catch (const plum::PipelineAbort& e) {
    spdlog::error("aborted: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
