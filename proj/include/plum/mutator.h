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

#ifndef PLUM_MUTATOR_H_
#define PLUM_MUTATOR_H_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plum/preference.h"
#include "plum/py/ast.h"
#include "plum/sampler.h"
#include "plum/sandbox.h"
#include "plum/testgen.h"
#include "plum/util/io.h"

namespace plum {

enum class MutationRule {
  kSwapArgs,
  kReplaceCall,
  kChangeOperator,
  kNegateCondition,
  kSwapIfElse,
  kOffByOne,
  kDropExceptionHandler,
  kAlterReturn,
};

std::string_view RuleName(MutationRule rule);
// Throws std::invalid_argument for an unknown name.
MutationRule RuleFromName(std::string_view name);
const std::set<MutationRule>& AllRules();

class UnparseableInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MutationConfig {
  double p = 0.3;
  uint64_t seed = 0;
  std::set<MutationRule> enabled_rules = AllRules();
  std::optional<size_t> max_mutations_per_program;  // unset = unlimited
  bool allow_unknown_types = false;
  bool require_behavioral_change = true;
  int max_attempts = 3;
};

struct AppliedMutation {
  MutationRule rule;
  py::SourceLoc loc;
};

struct MutationResult {
  std::string code;
  std::vector<AppliedMutation> applied;
  bool valid = true;
};

// Rewrites one program. Sites are visited in pre-order and every eligible
// site of an enabled rule gets an independent draw with probability
// config.p from a generator seeded with config.seed ^ Fnv1a64(code). With
// nothing applied the input is returned unchanged. Throws UnparseableInput.
MutationResult Mutate(std::string_view code, const MutationConfig& config);

// Tree-level variant; the module is rewritten in place.
std::vector<AppliedMutation> MutateTree(py::Module& module, const MutationConfig& config,
                                        uint64_t seed);

// Attempt k (0-based) runs with probability p, then halfway to 1, then 1.
double EscalatedProbability(double p, int attempt);

struct Mutant {
  CandidateSolution candidate;  // same ids as the source positive
  std::vector<AppliedMutation> applied;
  int attempts = 0;
};

struct SynthStats {
  size_t positives = 0;
  size_t emitted = 0;
  size_t skipped_no_site = 0;
  size_t skipped_invalid = 0;
  size_t skipped_no_behavior_change = 0;
  size_t sandbox_errors = 0;
};

struct SynthResult {
  std::vector<Mutant> mutants;
  SynthStats stats;
};

// One mutant per positive. With require_behavioral_change a sandbox is
// required and a mutant is kept only when it fails at least one of its
// instruction's tests.
SynthResult SynthNegatives(const std::vector<LabeledCandidate>& positives,
                           const MutationConfig& config,
                           const std::vector<TestArtifact>& tests,
                           const Sandbox* sandbox);

Json ToJson(const AppliedMutation& m);
Json ToJson(const Mutant& m);
Json ToJson(const SynthStats& s);

MutationConfig MutationConfigFromJson(const Json& j);

}  // namespace plum

#endif  // PLUM_MUTATOR_H_
