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

#include "plum/consistency.h"

#include <stdexcept>

namespace plum {
namespace {

ExecutionRequest ReferenceRequest(const TestArtifact& artifact, const Sandbox& sandbox) {
  return sandbox.MakeRequest(
      AssembleProgram(artifact.reference_solution, artifact.test_code));
}

}  // namespace

double ConsistencyStats::rate() const {
  return total > 0 ? 100.0 * static_cast<double>(passed) / static_cast<double>(total)
                   : 0.0;
}

ConsistencyStats& ConsistencyStats::operator+=(const ConsistencyStats& other) {
  total += other.total;
  passed += other.passed;
  return *this;
}

bool CheckArtifact(const TestArtifact& artifact, const Sandbox& sandbox) {
  if (artifact.test_code.empty()) {
    throw std::invalid_argument("artifact has empty test code");
  }
  ExecutionOutcome outcome = sandbox.Execute(ReferenceRequest(artifact, sandbox));
  if (outcome.status == ExecStatus::kSandboxError) {
    throw SandboxFailure(outcome.exit_detail);
  }
  return outcome.status == ExecStatus::kPass;
}

FilterResult FoldConsistency(std::vector<TestArtifact> artifacts,
                             const std::vector<ExecutionOutcome>& outcomes) {
  if (artifacts.size() != outcomes.size()) {
    throw std::invalid_argument("artifact/outcome count mismatch");
  }
  FilterResult result;
  for (size_t i = 0; i < artifacts.size(); ++i) {
    bool ok = !artifacts[i].test_code.empty() && outcomes[i].status == ExecStatus::kPass;
    artifacts[i].consistent = ok;
    ++result.stats.total;
    if (ok) {
      ++result.stats.passed;
      result.kept.push_back(artifacts[i]);
    }
    if (outcomes[i].status == ExecStatus::kSandboxError) ++result.sandbox_errors;
  }
  result.artifacts = std::move(artifacts);
  return result;
}

FilterResult FilterArtifacts(std::vector<TestArtifact> artifacts,
                             const Sandbox& sandbox) {
  std::vector<ExecutionRequest> requests;
  requests.reserve(artifacts.size());
  for (const auto& a : artifacts) requests.push_back(ReferenceRequest(a, sandbox));
  std::vector<ExecutionOutcome> outcomes = sandbox.ExecuteAll(requests);
  return FoldConsistency(std::move(artifacts), outcomes);
}

Json ToJson(const ConsistencyStats& stats) {
  Json j;
  j["total"] = stats.total;
  j["passed"] = stats.passed;
  j["rate"] = stats.defined() ? Json(stats.rate()) : Json(nullptr);
  j["rate_defined"] = stats.defined();
  return j;
}

ConsistencyStats ConsistencyStatsFromJson(const Json& j) {
  ConsistencyStats s;
  s.total = j.at("total").get<int64_t>();
  s.passed = j.at("passed").get<int64_t>();
  return s;
}

void WriteConsistencyOutputs(const std::string& dir, const FilterResult& result) {
  MakeDirs(dir);
  std::vector<Json> rows;
  rows.reserve(result.artifacts.size());
  for (const auto& a : result.artifacts) rows.push_back(ToJson(a));
  WriteJsonl(dir + "/test_artifacts.jsonl", rows);
  WriteFileAtomic(dir + "/consistency_stats.json", ToJson(result.stats).dump(2) + "\n");
}

}  // namespace plum
