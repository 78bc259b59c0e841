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

#ifndef PLUM_PIPELINE_H_
#define PLUM_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plum/backend.h"
#include "plum/consistency.h"
#include "plum/corpus.h"
#include "plum/mutator.h"
#include "plum/preference.h"
#include "plum/sampler.h"
#include "plum/sandbox.h"
#include "plum/testgen.h"
#include "plum/util/io.h"

namespace plum {

class PipelineAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusConfig {
  std::string path;
  LoadOptions load;
  std::optional<size_t> subsample;
  uint64_t subsample_seed = 0;
};

struct PipelineOptions {
  std::string work_dir = "work";
  std::string output_dir = "out";
  size_t chunk_size = 50;        // M
  size_t update_frequency = 1;   // T, online mode
  double sandbox_error_threshold = 0.25;
  std::vector<std::string> trainer_hook;  // argv; empty = none
  double hook_timeout_seconds = 0;        // 0 = unlimited
  bool hook_in_offline = false;
};

struct ReportOptions {
  std::string dataset_name;
  int histogram_bins = 10;
};

struct PlumConfig {
  std::string path;
  std::string base_dir;
  CorpusConfig corpus;
  GeneratorConfig testgen;
  SamplingConfig sampler;
  SandboxConfig sandbox;
  PreferenceConfig preference;
  bool mutation_enabled = false;
  MutationConfig mutation;
  PipelineOptions pipeline;
  ReportOptions report;
};

// Every key has a default; relative paths resolve against the config
// file's directory. Throws ConfigError.
PlumConfig LoadConfig(const std::string& path);

// Per-stage tallies. Candidate conservation:
//   candidates_sampled == positive + negative + unrunnable_excluded
//                         + dropped_with_instruction
//   candidates_sampled == candidates_requested - backend_shortfall
struct Counters {
  int64_t instructions = 0;
  int64_t instructions_testgen_failed = 0;
  int64_t instructions_no_tests = 0;
  int64_t instructions_sample_failed = 0;
  int64_t instructions_sampled = 0;
  int64_t instructions_dropped_no_positive = 0;
  int64_t instructions_dpo_no_negative = 0;
  int64_t testgen_responses = 0;
  int64_t testgen_parse_failures = 0;
  int64_t artifacts = 0;
  int64_t artifacts_consistent = 0;
  int64_t candidates_requested = 0;
  int64_t backend_shortfall = 0;
  int64_t candidates_sampled = 0;
  int64_t static_failures = 0;
  int64_t smoke_failures = 0;
  int64_t unrunnable = 0;
  int64_t positive = 0;
  int64_t negative = 0;
  int64_t unrunnable_excluded = 0;
  int64_t dropped_with_instruction = 0;
  int64_t executions = 0;
  int64_t sandbox_errors = 0;
  int64_t synthetic_negatives = 0;

  Counters& operator+=(const Counters& other);
  bool Balanced() const;
};

Json ToJson(const Counters& c);
Counters CountersFromJson(const Json& j);

struct TestStage {
  FilterResult filter;
  int64_t responses = 0;
  int64_t parse_failures = 0;
  std::vector<std::string> failed_instructions;  // backend errors
};

// Generation plus consistency filtering for a batch of instructions.
TestStage GenerateAndFilter(const std::vector<Instruction>& instructions,
                            const GeneratorConfig& config, CompletionBackend& backend,
                            const Sandbox& sandbox);

struct SampleStage {
  std::vector<CandidateSolution> candidates;  // instruction order
  // (instruction id, policy prompt) for every sampled instruction, in order.
  std::vector<std::pair<std::string, std::string>> prompts;
  std::vector<std::string> failed_instructions;
  int64_t requested = 0;
};

// `tests` are the consistent artifacts used for starter code.
SampleStage SampleInstructions(const std::vector<Instruction>& instructions,
                               const std::vector<TestArtifact>& tests,
                               const SamplingConfig& config, CompletionBackend& backend);

struct GradeStage {
  std::vector<LabeledCandidate> labeled;  // candidate order
  int64_t static_failures = 0;
  int64_t smoke_failures = 0;
  int64_t executions = 0;
  int64_t sandbox_errors = 0;
};

// Static check, smoke run, test matrix and labeling.
GradeStage GradeCandidates(const std::vector<CandidateSolution>& candidates,
                           const std::vector<TestArtifact>& tests, const Sandbox& sandbox);

// One group per prompt entry, in that order, possibly empty.
std::vector<InstructionGroup> GroupByInstruction(
    const std::vector<LabeledCandidate>& labeled,
    const std::vector<std::pair<std::string, std::string>>& prompts);

Json ToJson(const InstructionGroup& g);
InstructionGroup GroupFromJson(const Json& j);

struct DatasetPaths {
  std::string dpo;
  std::string kto;
  std::string stats_dir;
};

struct RunReport {
  std::vector<DatasetPaths> emitted;
  Counters counters;
  int rounds_completed = 0;
  bool finished = false;
};

class Pipeline {
 public:
  explicit Pipeline(std::string config_path);

  // Stop (as if killed) after this many newly processed chunks; state is
  // kept for resume.
  void set_chunk_budget(std::optional<size_t> budget) { chunk_budget_ = budget; }

  RunReport RunOffline();
  RunReport RunOnline();

 private:
  RunReport Run(bool online);

  std::string config_path_;
  std::optional<size_t> chunk_budget_;
};

}  // namespace plum

#endif  // PLUM_PIPELINE_H_
