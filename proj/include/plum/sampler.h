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

#ifndef PLUM_SAMPLER_H_
#define PLUM_SAMPLER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "plum/backend.h"
#include "plum/corpus.h"
#include "plum/testgen.h"
#include "plum/util/io.h"

namespace plum {

// Slots: {instruction} and {starter}. {starter} receives the rendered
// starter block, or nothing.
inline constexpr std::string_view kDefaultPolicyTemplate = "{instruction}{starter}";
inline constexpr std::string_view kDefaultStarterTemplate =
    "\n\nStart code:\n```python\n{starter_code}\n```";

struct SamplingConfig {
  BackendConfig backend;
  int k = 20;
  double temperature = 1.0;
  int max_tokens = 2048;
  uint64_t seed = 0;
  std::string policy_identifier = "policy-0";
  bool include_starter_code = true;
  std::string prompt_template{kDefaultPolicyTemplate};
  std::string starter_template{kDefaultStarterTemplate};
  int max_in_flight = 4;
};

struct CandidateSolution {
  std::string instruction_id;
  int candidate_id = 0;
  std::string code;
  std::string raw_completion;
  double temperature = 0;
  uint64_t seed = 0;
  std::string policy_identifier;
};

std::string BuildPolicyPrompt(const Instruction& instruction,
                              std::string_view starter_code,
                              const SamplingConfig& config);

// Starter code of the first consistent artifact that has one, else empty.
std::string StarterFor(const std::vector<TestArtifact>& artifacts);

// Fenced bodies joined by a blank line, or the text unchanged when it has
// no fences.
std::string ExtractCode(std::string_view raw_completion);

// Up to config.k candidates in response order. Throws BackendUnavailable or
// StubMiss from the backend.
std::vector<CandidateSolution> Sample(const Instruction& instruction,
                                      const std::string& prompt,
                                      const SamplingConfig& config,
                                      CompletionBackend& backend);

// prompts[i] belongs to instructions[i]. Output order follows the input.
std::vector<std::vector<CandidateSolution>> SampleAll(
    const std::vector<Instruction>& instructions,
    const std::vector<std::string>& prompts, const SamplingConfig& config,
    CompletionBackend& backend);

Json ToJson(const CandidateSolution& candidate);
CandidateSolution CandidateFromJson(const Json& j);

SamplingConfig SamplingConfigFromJson(const Json& j, const std::string& base_dir);

}  // namespace plum

#endif  // PLUM_SAMPLER_H_
