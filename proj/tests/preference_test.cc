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

#include <set>

#include "plum/preference.h"
#include "plum/util/rng.h"
#include "support/fixtures.h"

namespace plum {
namespace {

using testing::ScratchDir;

CandidateSolution Cand(const std::string& id, int n, const std::string& code) {
  CandidateSolution c;
  c.instruction_id = id;
  c.candidate_id = n;
  c.code = code;
  return c;
}

TestArtifact MakeTest(const std::string& id, int idx) {
  TestArtifact t;
  t.instruction_id = id;
  t.gen_index = idx;
  t.test_code = "assert True";
  t.consistent = true;
  return t;
}

LabeledCandidate Labeled(const std::string& id, int n, bool runnable, bool pass,
                         const std::string& code = "") {
  LabeledCandidate c;
  c.candidate = Cand(id, n, code.empty() ? id + "-code-" + std::to_string(n) : code);
  c.runnable = runnable;
  c.passed_all = runnable && pass;
  return c;
}

InstructionGroup Group(const std::string& id, int pos, int neg, int unrunnable) {
  InstructionGroup g{id, "prompt " + id, {}};
  int n = 0;
  for (int i = 0; i < pos; ++i) g.candidates.push_back(Labeled(id, n++, true, true));
  for (int i = 0; i < neg; ++i) g.candidates.push_back(Labeled(id, n++, true, false));
  for (int i = 0; i < unrunnable; ++i) g.candidates.push_back(Labeled(id, n++, false, false));
  return g;
}

TEST(LabelTest, EveryPassPatternOverThreeTests) {
  std::vector<TestArtifact> tests = {MakeTest("q", 0), MakeTest("q", 1), MakeTest("q", 2)};
  std::vector<CandidateSolution> cands;
  OutcomeMap outcomes;
  for (int mask = 0; mask < 8; ++mask) {
    cands.push_back(Cand("q", mask, "c" + std::to_string(mask)));
    for (int t = 0; t < 3; ++t) {
      ExecutionOutcome o;
      o.status = (mask >> t) & 1 ? ExecStatus::kPass : ExecStatus::kTestFailure;
      outcomes[{CandidateKey(cands.back()), TestKey(tests[t])}] = o;
    }
  }
  auto labeled = Label(cands, std::vector<bool>(8, true), std::vector<std::string>(8), tests, outcomes);
  for (int mask = 0; mask < 8; ++mask) {
    EXPECT_EQ(IsPositive(labeled[mask]), mask == 7) << mask;
    EXPECT_EQ(IsNegative(labeled[mask], false), mask != 7) << mask;
    EXPECT_EQ(labeled[mask].per_test.size(), 3u);
  }
}

TEST(LabelTest, AnyNonPassStatusIsANegative) {
  std::vector<TestArtifact> tests = {MakeTest("q", 0)};
  for (ExecStatus s : {ExecStatus::kTimeout, ExecStatus::kRuntimeError, ExecStatus::kSkipped,
                       ExecStatus::kResourceExceeded, ExecStatus::kLoadFailure}) {
    CandidateSolution c = Cand("q", 0, "x");
    OutcomeMap outcomes;
    ExecutionOutcome o;
    o.status = s;
    outcomes[{CandidateKey(c), TestKey(tests[0])}] = o;
    auto l = Label({c}, {true}, {""}, tests, outcomes);
    EXPECT_FALSE(IsPositive(l[0])) << StatusName(s);
  }
}

TEST(LabelTest, UnrunnableNeedsNoOutcomesAndMissingOutcomeThrows) {
  std::vector<TestArtifact> tests = {MakeTest("q", 0)};
  auto l = Label({Cand("q", 0, "x")}, {false}, {"static: bad"}, tests, {});
  EXPECT_FALSE(l[0].runnable);
  EXPECT_EQ(l[0].unrunnable_reason, "static: bad");
  EXPECT_FALSE(IsNegative(l[0], false));
  EXPECT_TRUE(IsNegative(l[0], true));
  EXPECT_THROW(Label({Cand("q", 0, "x")}, {true}, {""}, tests, {}), LabelError);
}

TEST(LabelTest, TestsOfOtherInstructionsAreIgnored) {
  std::vector<TestArtifact> tests = {MakeTest("a", 0), MakeTest("b", 0)};
  CandidateSolution c = Cand("a", 0, "x");
  OutcomeMap outcomes;
  outcomes[{CandidateKey(c), TestKey(tests[0])}].status = ExecStatus::kPass;
  auto l = Label({c}, {true}, {""}, tests, outcomes);
  EXPECT_TRUE(IsPositive(l[0]));
  EXPECT_EQ(l[0].per_test.size(), 1u);
}

TEST(FilterNoPositiveTest, DropsGroupsWithoutPositives) {
  PreferenceConfig c;
  auto f = FilterNoPositive({Group("a", 2, 1, 0), Group("b", 0, 3, 1), Group("c", 1, 0, 2)}, c);
  ASSERT_EQ(f.kto.size(), 2u);
  EXPECT_EQ(f.dropped_no_positive, std::vector<std::string>{"b"});
  ASSERT_EQ(f.dpo.size(), 1u);
  EXPECT_EQ(f.dpo[0].instruction_id, "a");
  EXPECT_EQ(f.dpo_skipped_no_negative, std::vector<std::string>{"c"});
  c.include_unrunnable_negatives = true;
  EXPECT_EQ(FilterNoPositive({Group("c", 1, 0, 2)}, c).dpo.size(), 1u);
}

TEST(DpoTest, PairCountAndInvariants) {
  PreferenceConfig c;
  c.seed = 3;
  std::vector<InstructionGroup> groups = {Group("a", 2, 5, 1), Group("b", 4, 1, 0)};
  DpoBuild d = BuildDpo(groups, c);
  EXPECT_EQ(d.pairs.size(), 3u);
  std::set<std::string> pos, neg;
  for (const auto& g : groups) {
    for (const auto& cand : g.candidates) {
      if (IsPositive(cand)) pos.insert(cand.candidate.code);
      if (IsNegative(cand, false)) neg.insert(cand.candidate.code);
    }
  }
  std::set<std::string> used_chosen, used_rejected;
  for (const auto& p : d.pairs) {
    EXPECT_TRUE(pos.count(p.chosen));
    EXPECT_TRUE(neg.count(p.rejected));
    EXPECT_NE(p.chosen, p.rejected);
    EXPECT_TRUE(used_chosen.insert(p.chosen).second);
    EXPECT_TRUE(used_rejected.insert(p.rejected).second);
    EXPECT_EQ(p.prompt, "prompt " + p.instruction_id);
  }
  c.max_pairs_per_instruction = 1;
  EXPECT_EQ(BuildDpo(groups, c).pairs.size(), 2u);
}

TEST(DpoTest, IdenticalTextsAreNotPaired) {
  InstructionGroup g{"a", "p", {Labeled("a", 0, true, true, "same"), Labeled("a", 1, true, false, "same")}};
  DpoBuild d = BuildDpo({g}, PreferenceConfig{});
  EXPECT_TRUE(d.pairs.empty());
  EXPECT_EQ(d.identical_skipped, 1u);
}

TEST(DpoTest, DeterministicAndOrderIndependentPerInstruction) {
  PreferenceConfig c;
  c.seed = 17;
  std::vector<InstructionGroup> groups = {Group("a", 3, 4, 0), Group("b", 5, 2, 0), Group("c", 2, 2, 0)};
  DpoBuild x = BuildDpo(groups, c);
  DpoBuild y = BuildDpo(groups, c);
  std::vector<InstructionGroup> rev(groups.rbegin(), groups.rend());
  DpoBuild z = BuildDpo(rev, c);
  ASSERT_EQ(x.pairs.size(), y.pairs.size());
  for (size_t i = 0; i < x.pairs.size(); ++i) EXPECT_EQ(ToJson(x.pairs[i]), ToJson(y.pairs[i]));
  std::multiset<std::string> xs, zs;
  for (const auto& p : x.pairs) xs.insert(ToJson(p).dump());
  for (const auto& p : z.pairs) zs.insert(ToJson(p).dump());
  EXPECT_EQ(xs, zs);
}

TEST(KtoTest, LabelsFollowPassedAll) {
  PreferenceConfig c;
  auto kto = BuildKto({Group("a", 2, 3, 2)}, c);
  EXPECT_EQ(kto.size(), 5u);
  int desirable = 0;
  for (const auto& r : kto) desirable += r.desirable;
  EXPECT_EQ(desirable, 2);
  c.include_unrunnable_negatives = true;
  EXPECT_EQ(BuildKto({Group("a", 2, 3, 2)}, c).size(), 7u);
}

TEST(KtoTest, BalancedRatioGivesEqualCountsProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<InstructionGroup> groups;
    size_t n = 1 + rng.Below(6);
    for (size_t g = 0; g < n; ++g) {
      groups.push_back(Group("g" + std::to_string(g), static_cast<int>(rng.Below(6)),
                             static_cast<int>(rng.Below(6)), static_cast<int>(rng.Below(3))));
    }
    PreferenceConfig c;
    c.seed = trial;
    c.kto_balance_ratio = 1.0;
    c.include_unrunnable_negatives = rng.Coin();
    size_t des = 0, und = 0;
    for (const auto& r : BuildKto(groups, c)) (r.desirable ? des : und)++;
    PreferenceConfig unbalanced = c;
    unbalanced.kto_balance_ratio.reset();
    size_t all_des = 0, all_und = 0;
    for (const auto& r : BuildKto(groups, unbalanced)) (r.desirable ? all_des : all_und)++;
    if (all_des > 0 && all_und > 0) {
      EXPECT_EQ(des, und) << trial;
      EXPECT_EQ(des, std::min(all_des, all_und));
    } else {
      EXPECT_EQ(des, all_des);
      EXPECT_EQ(und, all_und);
    }
  }
}

TEST(KtoTest, OtherRatiosAndOrderPreserved) {
  PreferenceConfig c;
  c.kto_balance_ratio = 2.0;
  auto kto = BuildKto({Group("a", 10, 3, 0)}, c);
  size_t des = 0;
  for (const auto& r : kto) des += r.desirable;
  EXPECT_EQ(des, 6u);
  EXPECT_EQ(kto.size() - des, 3u);
  auto number = [](const KtoRecord& r) { return std::stoi(r.completion.substr(r.completion.rfind('-') + 1)); };
  for (size_t i = 1; i < kto.size(); ++i) EXPECT_LT(number(kto[i - 1]), number(kto[i]));
  c.kto_balance_ratio = 0.0;
  EXPECT_THROW(BuildKto({Group("a", 1, 1, 0)}, c), std::invalid_argument);
}

TEST(PassRatioTest, Basics) {
  EXPECT_EQ(PassRatio(Group("a", 1, 3, 0)), 0.25);
  EXPECT_EQ(PassRatio(Group("a", 0, 0, 0)), std::nullopt);
}

TEST(WriterTest, JsonlSchemas) {
  ScratchDir dir;
  WriteDpo(dir / "dpo.jsonl", {{"i", "p", "c", "r"}});
  WriteKto(dir / "kto.jsonl", {{"i", "p", "x", true}, {"i", "p", "y", false}});
  EXPECT_EQ(ReadFile(dir / "dpo.jsonl"),
            "{\"instruction_id\":\"i\",\"prompt\":\"p\",\"chosen\":\"c\",\"rejected\":\"r\"}\n");
  auto kto = testing::ReadLines(dir / "kto.jsonl");
  ASSERT_EQ(kto.size(), 2u);
  EXPECT_EQ(Json::parse(kto[0])["label"], "desirable");
  EXPECT_EQ(Json::parse(kto[1])["label"], "undesirable");
}

TEST(WriterTest, LabeledRoundTrip) {
  LabeledCandidate c = Labeled("a", 1, true, false);
  c.per_test = {{"a#t0", ExecStatus::kPass}, {"a#t1", ExecStatus::kTimeout}};
  LabeledCandidate b = LabeledFromJson(ToJson(c));
  EXPECT_EQ(b.per_test, c.per_test);
  EXPECT_EQ(b.passed_all, false);
  EXPECT_EQ(b.runnable, true);
}

TEST(ConfigTest, FromJson) {
  PreferenceConfig c = PreferenceConfigFromJson(
      Json{{"seed", 4}, {"max_pairs_per_instruction", 2}, {"kto_balance_ratio", 1}});
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.max_pairs_per_instruction, std::optional<size_t>(2));
  EXPECT_EQ(c.kto_balance_ratio, std::optional<double>(1.0));
  EXPECT_FALSE(PreferenceConfigFromJson(Json::object()).kto_balance_ratio.has_value());
}

}  // namespace
}  // namespace plum
