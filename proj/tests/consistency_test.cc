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

#include <gtest/gtest.h>

#include "plum/consistency.h"
#include "plum/report.h"
#include "support/fixtures.h"

namespace plum {
namespace {

using testing::ScratchDir;

TestArtifact Artifact(const std::string& id, int idx, const std::string& ref,
                      const std::string& test) {
  TestArtifact a;
  a.instruction_id = id;
  a.gen_index = idx;
  a.reference_solution = ref;
  a.test_code = test;
  return a;
}

ExecutionOutcome Outcome(ExecStatus s) {
  ExecutionOutcome o;
  o.status = s;
  return o;
}

TEST(ConsistencyStatsTest, RateAndAccumulation) {
  ConsistencyStats s{4500, 2869};
  EXPECT_TRUE(s.defined());
  EXPECT_NEAR(s.rate(), 63.7555, 1e-3);
  ConsistencyStats empty;
  EXPECT_FALSE(empty.defined());
  EXPECT_EQ(empty.rate(), 0.0);
  s += ConsistencyStats{10, 1};
  EXPECT_EQ(s.total, 4510);
  EXPECT_EQ(s.passed, 2870);
  Json j = ToJson(empty);
  EXPECT_TRUE(j["rate"].is_null());
  EXPECT_FALSE(j["rate_defined"].get<bool>());
  EXPECT_EQ(ConsistencyStatsFromJson(ToJson(s)).passed, 2870);
}

TEST(FoldTest, OnlyPassKeeps) {
  std::vector<TestArtifact> in;
  std::vector<ExecutionOutcome> out;
  for (int s = 0; s <= static_cast<int>(ExecStatus::kSkipped); ++s) {
    if (static_cast<ExecStatus>(s) == ExecStatus::kSandboxError) continue;
    in.push_back(Artifact("i", s, "r", "t"));
    out.push_back(Outcome(static_cast<ExecStatus>(s)));
  }
  FilterResult r = FoldConsistency(in, out);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].gen_index, 0);
  EXPECT_EQ(r.stats.total, static_cast<int64_t>(in.size()));
  EXPECT_EQ(r.stats.passed, 1);
  for (const auto& a : r.artifacts) ASSERT_TRUE(a.consistent.has_value());
}

TEST(FoldTest, SandboxErrorsAreCountedAndNotKept) {
  FilterResult r = FoldConsistency({Artifact("i", 0, "r", "t")}, {Outcome(ExecStatus::kSandboxError)});
  EXPECT_EQ(r.sandbox_errors, 1);
  EXPECT_TRUE(r.kept.empty());
}

TEST(FilterTest, DropsInconsistentReference) {
  Sandbox sb(testing::FastSandbox());
  std::vector<TestArtifact> in = {
      Artifact("a", 0, "def f(x):\n    return x + 1", "assert f(1) == 2"),
      Artifact("a", 1, "def f(x):\n    return x - 1", "assert f(1) == 2"),
      Artifact("a", 2, "def f(x):\n    return x + 1", "assert f(1) == 2\nassert g(1)"),
  };
  FilterResult r = FilterArtifacts(in, sb);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].gen_index, 0);
  EXPECT_EQ(r.stats.total, 3);
  EXPECT_EQ(r.stats.passed, 1);
  EXPECT_TRUE(CheckArtifact(in[0], sb));
  EXPECT_FALSE(CheckArtifact(in[1], sb));
  EXPECT_THROW(CheckArtifact(Artifact("a", 3, "x = 1", ""), sb), std::invalid_argument);
}

TEST(FilterTest, InfrastructureFailureIsNotAVerdict) {
  SandboxConfig c = testing::FastSandbox();
  c.interpreter = "/nonexistent/python";
  Sandbox sb(c);
  EXPECT_THROW(CheckArtifact(Artifact("a", 0, "x = 1", "assert x"), sb), SandboxFailure);
}

TEST(FilterTest, StatsFileMatchesRawRecords) {
  ScratchDir dir;
  Sandbox sb(testing::FastSandbox());
  std::vector<TestArtifact> in;
  for (int i = 0; i < 6; ++i) {
    in.push_back(Artifact("a", i, "v = " + std::to_string(i), "assert v % 2 == 0"));
  }
  WriteConsistencyOutputs(dir.path(), FilterArtifacts(in, sb));
  ConsistencyStats recomputed;
  for (const auto& r : ReadJsonl(dir / "test_artifacts.jsonl")) {
    ++recomputed.total;
    if (r.value["consistent"].get<bool>()) ++recomputed.passed;
  }
  Json file = Json::parse(ReadFile(dir / "consistency_stats.json"));
  EXPECT_EQ(file["total"], recomputed.total);
  EXPECT_EQ(file["passed"], recomputed.passed);
  EXPECT_EQ(file["rate"].get<double>(), recomputed.rate());
  EXPECT_EQ(recomputed.passed, 3);
}

}  // namespace
}  // namespace plum
