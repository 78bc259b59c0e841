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

#include "plum/sandbox.h"
#include "support/fixtures.h"

namespace plum {
namespace {

using testing::FastSandbox;
using testing::ScratchDir;

ExecStatus StatusOf(const Sandbox& sb, const std::string& program, bool smoke = false) {
  return sb.Execute(sb.MakeRequest(program, smoke)).status;
}

TEST(StatusTest, NamesRoundTrip) {
  for (int i = 0; i <= static_cast<int>(ExecStatus::kSkipped); ++i) {
    auto s = static_cast<ExecStatus>(i);
    EXPECT_EQ(StatusFromName(StatusName(s)), s);
  }
  EXPECT_EQ(StatusName(ExecStatus::kTestFailure), "TestFailure");
  EXPECT_THROW(StatusFromName("Bogus"), std::invalid_argument);
}

TEST(StaticCheckTest, GrammarOnly) {
  EXPECT_TRUE(StaticCheck("def f(x):\n    return x\n").ok);
  StaticCheckResult r = StaticCheck("def f(x)\n    return x\n");
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.line, 1);
  EXPECT_EQ(r.diagnostic.rfind("line 1:", 0), 0u);
}

TEST(StaticCheckTest, AnalyzerVerdict) {
  SandboxConfig c = FastSandbox();
  c.analyzer = {"/bin/sh", "-c", "grep -q forbidden \"$0\" && exit 1; exit 0"};
  Sandbox sb(c);
  EXPECT_TRUE(sb.Check("x = 1\n").ok);
  StaticCheckResult r = sb.Check("forbidden = 1\n");
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(sb.Check("x = (\n").ok);
}

TEST(AssembleTest, JoinsWithBlankLine) {
  EXPECT_EQ(AssembleProgram("a = 1", "assert a"), "a = 1\n\nassert a");
  EXPECT_EQ(AssembleProgram("a = 1\n", "assert a"), "a = 1\n\nassert a");
}

TEST(SandboxTest, StatusTaxonomy) {
  Sandbox sb(FastSandbox());
  EXPECT_EQ(StatusOf(sb, "assert 1 + 1 == 2\n"), ExecStatus::kPass);
  EXPECT_EQ(StatusOf(sb, "assert 1 + 1 == 3\n"), ExecStatus::kTestFailure);
  EXPECT_EQ(StatusOf(sb, "raise KeyError('k')\n"), ExecStatus::kRuntimeError);
  EXPECT_EQ(StatusOf(sb, "import plum_missing_mod\n"), ExecStatus::kLoadFailure);
  EXPECT_EQ(StatusOf(sb, "import plum_missing_mod\n", true), ExecStatus::kLoadFailure);
  EXPECT_EQ(StatusOf(sb, "raise ValueError()\n", true), ExecStatus::kLoadFailure);
  EXPECT_EQ(StatusOf(sb, "def f(:\n"), ExecStatus::kLoadFailure);
  EXPECT_EQ(StatusOf(sb, "import sys\nsys.exit(0)\n"), ExecStatus::kPass);
  EXPECT_EQ(StatusOf(sb, "import sys\nsys.exit(4)\n"), ExecStatus::kRuntimeError);
  EXPECT_EQ(StatusOf(sb, "import os\nos._exit(0)\n"), ExecStatus::kRuntimeError);
  EXPECT_EQ(StatusOf(sb, "import os, signal\nos.kill(os.getpid(), signal.SIGSEGV)\n"),
            ExecStatus::kRuntimeError);
}

TEST(SandboxTest, TimeoutWithinBound) {
  Sandbox sb(FastSandbox());
  ExecutionOutcome o = sb.Execute(sb.MakeRequest("while True:\n    pass\n"));
  EXPECT_EQ(o.status, ExecStatus::kTimeout);
  EXPECT_LE(o.duration_seconds, 3.0);
  o = sb.Execute(sb.MakeRequest("import time\ntime.sleep(60)\n"));
  EXPECT_EQ(o.status, ExecStatus::kTimeout);
  EXPECT_LE(o.duration_seconds, 3.0);
}

TEST(SandboxTest, MemoryLimit) {
  SandboxConfig c = FastSandbox();
  c.memory_limit_bytes = 128ull << 20;
  Sandbox sb(c);
  EXPECT_EQ(StatusOf(sb, "x = bytearray(1 << 30)\n"), ExecStatus::kResourceExceeded);
  EXPECT_EQ(StatusOf(sb, "x = bytearray(1 << 20)\n"), ExecStatus::kPass);
}

TEST(SandboxTest, OutputLimit) {
  SandboxConfig c = FastSandbox();
  c.output_limit_bytes = 1 << 20;
  Sandbox sb(c);
  ExecutionOutcome o =
      sb.Execute(sb.MakeRequest("import sys\nwhile True:\n    sys.stdout.write('x' * 65536)\n"));
  EXPECT_EQ(o.status, ExecStatus::kResourceExceeded);
  EXPECT_LE(o.stdout_tail.size(), kTailBytes);
}

TEST(SandboxTest, TailsAreCaptured) {
  Sandbox sb(FastSandbox());
  ExecutionOutcome o = sb.Execute(sb.MakeRequest("print('hello')\nassert False, 'nope'\n"));
  EXPECT_EQ(o.status, ExecStatus::kTestFailure);
  EXPECT_NE(o.stdout_tail.find("hello"), std::string::npos);
  EXPECT_NE(o.exit_detail.find("TESTFAIL"), std::string::npos);
}

TEST(SandboxTest, EnvironmentIsScrubbed) {
  setenv("PLUM_SECRET_TOKEN", "x", 1);
  Sandbox sb(FastSandbox());
  EXPECT_EQ(StatusOf(sb, "import os\nassert 'PLUM_SECRET_TOKEN' not in os.environ\n"
                    "assert os.environ['PYTHONHASHSEED'] == '0'\n"),
            ExecStatus::kPass);
}

TEST(SandboxTest, RunsInPrivateScratchDir) {
  Sandbox sb(FastSandbox());
  EXPECT_EQ(StatusOf(sb, "import os\nopen('scratch.txt', 'w').write('x')\n"
                    "assert os.path.exists('program.py')\n"),
            ExecStatus::kPass);
  EXPECT_EQ(StatusOf(sb, "import os\nassert not os.path.exists('scratch.txt')\n"), ExecStatus::kPass);
}

TEST(SandboxTest, NoNetworkStripsProxies) {
  setenv("http_proxy", "http://proxy:3128", 1);
  SandboxConfig c = FastSandbox();
  c.no_network = true;
  Sandbox sb(c);
  EXPECT_EQ(StatusOf(sb, "import os\nassert os.environ.get('PLUM_NO_NETWORK') == '1'\n"
                    "assert 'http_proxy' not in os.environ\n"),
            ExecStatus::kPass);
}

TEST(SandboxTest, InfrastructureFailuresAreSandboxErrors) {
  SandboxConfig c = FastSandbox();
  c.interpreter = "/nonexistent/python";
  Sandbox sb(c);
  EXPECT_EQ(StatusOf(sb, "pass\n"), ExecStatus::kSandboxError);
  SandboxConfig d = FastSandbox();
  d.shim_path = "/nonexistent/shim.py";
  Sandbox sb2(d);
  EXPECT_EQ(StatusOf(sb2, "pass\n"), ExecStatus::kSandboxError);
}

TEST(SandboxTest, InvalidConfigRejected) {
  SandboxConfig c = FastSandbox();
  c.time_limit_seconds = 0;
  EXPECT_THROW(Sandbox{c}, std::invalid_argument);
  c = FastSandbox();
  c.parallelism = 0;
  EXPECT_THROW(Sandbox{c}, std::invalid_argument);
}

TEST(SandboxTest, ExecuteAllKeepsOrderAcrossParallelism) {
  std::vector<std::string> programs = {"assert True\n", "assert False\n", "raise OSError()\n",
                                       "import nope_mod\n", "assert 2 > 1\n"};
  std::vector<ExecStatus> expected = {ExecStatus::kPass, ExecStatus::kTestFailure,
                                      ExecStatus::kRuntimeError, ExecStatus::kLoadFailure,
                                      ExecStatus::kPass};
  for (int p : {1, 4}) {
    Sandbox sb(FastSandbox(p));
    std::vector<ExecutionRequest> reqs;
    for (const auto& prog : programs) reqs.push_back(sb.MakeRequest(prog));
    auto out = sb.ExecuteAll(reqs);
    for (size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].status, expected[i]) << i;
  }
}

TEST(SandboxTest, ShortCircuitSkipsRemainingTests) {
  SandboxConfig c = FastSandbox(2);
  c.short_circuit = true;
  Sandbox sb(c);
  std::vector<MatrixJob> jobs = {
      {"c1", "t1", sb.MakeRequest("assert True\n")},
      {"c1", "t2", sb.MakeRequest("assert False\n")},
      {"c1", "t3", sb.MakeRequest("assert True\n")},
      {"c2", "t1", sb.MakeRequest("assert True\n")},
  };
  OutcomeMap out = sb.RunMatrix(jobs);
  EXPECT_EQ(out.at({"c1", "t1"}).status, ExecStatus::kPass);
  EXPECT_EQ(out.at({"c1", "t2"}).status, ExecStatus::kTestFailure);
  EXPECT_EQ(out.at({"c1", "t3"}).status, ExecStatus::kSkipped);
  EXPECT_EQ(out.at({"c2", "t1"}).status, ExecStatus::kPass);

  c.short_circuit = false;
  Sandbox full(c);
  EXPECT_EQ(full.RunMatrix(jobs).at({"c1", "t3"}).status, ExecStatus::kPass);
  jobs.push_back(jobs[0]);
  EXPECT_THROW(full.RunMatrix(jobs), std::invalid_argument);
}

TEST(SandboxTest, ConfigFromJson) {
  SandboxConfig c = SandboxConfigFromJson(
      Json{{"time_limit_seconds", 3}, {"memory_limit_mib", 64}, {"parallelism", 2},
           {"shim_path", "shim.py"}},
      "/base");
  EXPECT_EQ(c.time_limit_seconds, 3);
  EXPECT_EQ(c.memory_limit_bytes, 64ull << 20);
  EXPECT_EQ(c.parallelism, 2);
  EXPECT_EQ(c.shim_path, "/base/shim.py");
}

TEST(SandboxTest, OutcomeJsonOmitsDuration) {
  ExecutionOutcome o;
  o.status = ExecStatus::kTimeout;
  o.duration_seconds = 1.5;
  o.exit_detail = "d";
  Json j = ToJson(o);
  EXPECT_FALSE(j.contains("duration_seconds"));
  EXPECT_EQ(OutcomeFromJson(j).status, ExecStatus::kTimeout);
}

}  // namespace
}  // namespace plum
