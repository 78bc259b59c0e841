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

#ifndef PLUM_CONSISTENCY_H_
#define PLUM_CONSISTENCY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "plum/sandbox.h"
#include "plum/testgen.h"
#include "plum/util/io.h"

namespace plum {

struct ConsistencyStats {
  int64_t total = 0;
  int64_t passed = 0;

  bool defined() const { return total > 0; }
  // Percentage; 0 when undefined.
  double rate() const;
  ConsistencyStats& operator+=(const ConsistencyStats& other);
};

struct FilterResult {
  std::vector<TestArtifact> artifacts;  // all inputs, `consistent` set
  std::vector<TestArtifact> kept;
  ConsistencyStats stats;
  int64_t sandbox_errors = 0;
};

// Throws SandboxFailure when the run hit an infrastructure error.
bool CheckArtifact(const TestArtifact& artifact, const Sandbox& sandbox);

// Pure fold: outcomes[i] is the reference+test run of artifacts[i].
FilterResult FoldConsistency(std::vector<TestArtifact> artifacts,
                             const std::vector<ExecutionOutcome>& outcomes);

FilterResult FilterArtifacts(std::vector<TestArtifact> artifacts,
                             const Sandbox& sandbox);

Json ToJson(const ConsistencyStats& stats);
ConsistencyStats ConsistencyStatsFromJson(const Json& j);

// Writes test_artifacts.jsonl and consistency_stats.json into `dir`.
void WriteConsistencyOutputs(const std::string& dir, const FilterResult& result);

}  // namespace plum

#endif  // PLUM_CONSISTENCY_H_
