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

#include <mutex>

#include "plum/sampler.h"
#include "support/fixtures.h"

namespace plum {
namespace {

class ListBackend : public CompletionBackend {
 public:
  explicit ListBackend(std::vector<std::string> texts) : texts_(std::move(texts)) {}
  std::vector<std::string> Complete(const CompletionRequest& request) override {
    std::lock_guard<std::mutex> lock(mu_);
    requests.push_back(request);
    if (request.instruction_id == "down") throw BackendUnavailable("down");
    std::vector<std::string> out = texts_;
    if (out.size() > request.count) out.resize(request.count);
    return out;
  }
  std::vector<CompletionRequest> requests;

 private:
  std::mutex mu_;
  std::vector<std::string> texts_;
};

Instruction Ins(const std::string& id, const std::string& text) {
  return {id, text, "s", Json::object()};
}

TEST(PolicyPromptTest, StarterBlockIsOptional) {
  SamplingConfig c;
  EXPECT_EQ(BuildPolicyPrompt(Ins("a", "Do it."), "", c), "Do it.");
  EXPECT_EQ(BuildPolicyPrompt(Ins("a", "Do it."), "def f():", c),
            "Do it.\n\nStart code:\n```python\ndef f():\n```");
  c.include_starter_code = false;
  EXPECT_EQ(BuildPolicyPrompt(Ins("a", "Do it."), "def f():", c), "Do it.");
}

TEST(PolicyPromptTest, SlotsAreSubstitutedOnce) {
  SamplingConfig c;
  c.prompt_template = "Q: {instruction}\n{starter}END";
  EXPECT_EQ(BuildPolicyPrompt(Ins("a", "use {starter} literally"), "", c),
            "Q: use {starter} literally\nEND");
}

TEST(StarterForTest, FirstConsistentWithStarter) {
  TestArtifact a, b, c;
  a.starter_code = "bad";
  a.consistent = false;
  b.consistent = true;
  c.starter_code = "good";
  c.consistent = true;
  EXPECT_EQ(StarterFor({a, b, c}), "good");
  EXPECT_EQ(StarterFor({a}), "");
}

TEST(ExtractCodeTest, FencesAndBareText) {
  EXPECT_EQ(ExtractCode("def f():\n    return 1\n"), "def f():\n    return 1\n");
  EXPECT_EQ(ExtractCode("Here:\n```python\nx = 1\n```\nDone."), "x = 1");
  EXPECT_EQ(ExtractCode("```\na\n```\ntext\n```py\nb\n```"), "a\n\nb");
}

TEST(SampleTest, RecordsProvenanceAndTruncates) {
  ListBackend backend({"```python\nx = 1\n```", "y = 2", "z = 3"});
  SamplingConfig c;
  c.k = 2;
  c.temperature = 0.8;
  c.seed = 99;
  c.policy_identifier = "policy-7";
  auto out = Sample(Ins("a", "t"), "prompt", c, backend);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].code, "x = 1");
  EXPECT_EQ(out[0].raw_completion, "```python\nx = 1\n```");
  EXPECT_EQ(out[1].candidate_id, 1);
  EXPECT_EQ(out[1].policy_identifier, "policy-7");
  EXPECT_EQ(out[1].seed, 99u);
  EXPECT_EQ(backend.requests[0].temperature, 0.8);
  EXPECT_EQ(backend.requests[0].count, 2u);
  EXPECT_EQ(backend.requests[0].prompt, "prompt");
}

TEST(SampleTest, ShortfallIsNotAnError) {
  ListBackend backend({"a = 1"});
  SamplingConfig c;
  c.k = 5;
  EXPECT_EQ(Sample(Ins("a", "t"), "p", c, backend).size(), 1u);
}

TEST(SampleTest, SampleAllKeepsOrderAndPropagatesErrors) {
  ListBackend backend({"a = 1", "b = 2"});
  SamplingConfig c;
  c.k = 2;
  auto all = SampleAll({Ins("x", "t"), Ins("y", "t")}, {"p1", "p2"}, c, backend);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1][0].instruction_id, "y");
  EXPECT_THROW(SampleAll({Ins("x", "t")}, {}, c, backend), std::invalid_argument);
  EXPECT_THROW(SampleAll({Ins("down", "t")}, {"p"}, c, backend), BackendUnavailable);
}

TEST(SampleTest, CandidateJsonRoundTrip) {
  CandidateSolution c{"i", 3, "code", "raw", 1.0, 5, "pol"};
  Json j = ToJson(c);
  EXPECT_EQ(j["sampling"]["policy_identifier"], "pol");
  CandidateSolution b = CandidateFromJson(j);
  EXPECT_EQ(b.candidate_id, 3);
  EXPECT_EQ(b.raw_completion, "raw");
  EXPECT_EQ(b.seed, 5u);
}

TEST(SampleTest, ConfigFromJson) {
  SamplingConfig c = SamplingConfigFromJson(
      Json{{"backend", "stub"}, {"stub_path", "p.jsonl"}, {"k", 4}, {"policy_identifier", "v2"}},
      "/d");
  EXPECT_EQ(c.k, 4);
  EXPECT_EQ(c.policy_identifier, "v2");
  EXPECT_EQ(c.backend.stub_path, "/d/p.jsonl");
  EXPECT_THROW(SamplingConfigFromJson(Json{{"k", 0}}, "/d"), std::invalid_argument);
}

}  // namespace
}  // namespace plum
