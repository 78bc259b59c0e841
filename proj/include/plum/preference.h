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

#ifndef PLUM_PREFERENCE_H_
#define PLUM_PREFERENCE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plum/sampler.h"
#include "plum/sandbox.h"
#include "plum/testgen.h"
#include "plum/util/io.h"

namespace plum {

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix keys.
std::string CandidateKey(const CandidateSolution& candidate);
std::string TestKey(const TestArtifact& test);

struct LabeledCandidate {
  CandidateSolution candidate;
  std::vector<std::pair<std::string, ExecStatus>> per_test;  // in test order
  bool runnable = false;
  bool passed_all = false;
  std::string unrunnable_reason;
};

struct InstructionGroup {
  std::string instruction_id;
  std::string prompt;
  std::vector<LabeledCandidate> candidates;
};

struct PreferenceConfig {
  uint64_t seed = 0;
  std::optional<size_t> max_pairs_per_instruction;  // unset = unlimited
  bool include_unrunnable_negatives = false;
  std::optional<double> kto_balance_ratio;  // desirable : undesirable
};

struct DpoPair {
  std::string instruction_id;
  std::string prompt;
  std::string chosen;
  std::string rejected;
};

struct KtoRecord {
  std::string instruction_id;
  std::string prompt;
  std::string completion;
  bool desirable = false;
};

// runnable[i] is the static-check and smoke verdict for candidates[i];
// reasons[i] explains a false one. `tests` may span several instructions;
// each candidate is graded against its own instruction's tests only.
std::vector<LabeledCandidate> Label(const std::vector<CandidateSolution>& candidates,
                                    const std::vector<bool>& runnable,
                                    const std::vector<std::string>& reasons,
                                    const std::vector<TestArtifact>& tests,
                                    const OutcomeMap& outcomes);

bool IsPositive(const LabeledCandidate& c);
bool IsNegative(const LabeledCandidate& c, bool include_unrunnable);
size_t CountPositives(const InstructionGroup& g);
size_t CountNegatives(const InstructionGroup& g, bool include_unrunnable);
size_t CountUnrunnable(const InstructionGroup& g);

struct FilteredGroups {
  std::vector<InstructionGroup> kto;  // groups with at least one positive
  std::vector<InstructionGroup> dpo;  // ... and at least one negative
  std::vector<std::string> dropped_no_positive;
  std::vector<std::string> dpo_skipped_no_negative;
};

FilteredGroups FilterNoPositive(std::vector<InstructionGroup> groups,
                                const PreferenceConfig& config);

struct DpoBuild {
  std::vector<DpoPair> pairs;
  size_t identical_skipped = 0;
};

DpoBuild BuildDpo(const std::vector<InstructionGroup>& groups,
                  const PreferenceConfig& config);

std::vector<KtoRecord> BuildKto(const std::vector<InstructionGroup>& groups,
                                const PreferenceConfig& config);

// Fraction of sampled candidates that are positive; nullopt for an empty
// group.
std::optional<double> PassRatio(const InstructionGroup& group);

Json ToJson(const LabeledCandidate& c);
LabeledCandidate LabeledFromJson(const Json& j);
Json ToJson(const DpoPair& pair);
Json ToJson(const KtoRecord& record);

void WriteDpo(const std::string& path, const std::vector<DpoPair>& pairs);
void WriteKto(const std::string& path, const std::vector<KtoRecord>& records);

PreferenceConfig PreferenceConfigFromJson(const Json& j);

}  // namespace plum

#endif  // PLUM_PREFERENCE_H_
