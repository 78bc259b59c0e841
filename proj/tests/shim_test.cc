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

#include <chrono>

#include "plum/sandbox.h"
#include "plum/util/process.h"
#include "support/fixtures.h"

namespace plum {
namespace {

using testing::ScratchDir;

struct ShimRun {
  int exit_code = -1;
  std::string last_stderr_line;
  size_t markers = 0;
};

ShimRun RunShim(const std::string& program, bool smoke = false) {
  ScratchDir dir;
  ProcessSpec spec;
  spec.argv = {"python3", "-S", PLUM_SHIM_SOURCE};
  if (smoke) spec.argv.push_back("--smoke");
  spec.argv.push_back(program);
  spec.stderr_path = dir / "err";
  spec.timeout_seconds = 20;
  ProcessResult r = RunProcess(spec);
  ShimRun out;
  out.exit_code = r.kind == ProcessResult::Kind::kExited ? r.exit_code : -1;
  for (const auto& line : testing::ReadLines(dir / "err")) {
    if (line.rfind("PLUM:", 0) == 0) ++out.markers;
    out.last_stderr_line = line;
  }
  return out;
}

std::string Fixture(const std::string& name) { return testing::FixtureDir() + "/shim/" + name; }

TEST(ShimProtocolTest, FourStatusFixtures) {
  struct Case {
    const char* file;
    int code;
    const char* marker;
  };
  for (const Case& c : {Case{"pass.py", 0, "PLUM:PASS:"}, Case{"assert_fail.py", 10, "PLUM:TESTFAIL:"},
                        Case{"raise.py", 11, "PLUM:RUNTIME:"},
                        Case{"import_fail.py", 12, "PLUM:LOADFAIL:"}}) {
    ShimRun r = RunShim(Fixture(c.file));
    EXPECT_EQ(r.exit_code, c.code) << c.file;
    EXPECT_EQ(r.last_stderr_line.rfind(c.marker, 0), 0u) << c.file << ": " << r.last_stderr_line;
    EXPECT_EQ(r.markers, 1u) << c.file;
  }
}

TEST(ShimProtocolTest, SmokeModeTurnsDefinitionErrorsIntoLoadFailures) {
  EXPECT_EQ(RunShim(Fixture("import_fail.py"), true).exit_code, 12);
  EXPECT_EQ(RunShim(Fixture("raise.py"), true).exit_code, 12);
  EXPECT_EQ(RunShim(Fixture("pass.py"), true).exit_code, 0);
}

TEST(ShimProtocolTest, MissingProgramIsInternal) {
  ShimRun r = RunShim("/nonexistent/program.py");
  EXPECT_EQ(r.exit_code, 120);
  EXPECT_EQ(r.last_stderr_line.rfind("PLUM:INTERNAL:", 0), 0u);
}

TEST(ShimProtocolTest, MarkerIsLastEvenAfterNoisyStderr) {
  ScratchDir dir;
  WriteFileAtomic(dir / "p.py", "import sys\nsys.stderr.write('noise\\nPLUM:PASS:fake')\nassert False\n");
  ShimRun r = RunShim(dir / "p.py");
  EXPECT_EQ(r.exit_code, 10);
  EXPECT_EQ(r.last_stderr_line, "PLUM:TESTFAIL:AssertionError");
}

TEST(ShimProtocolTest, ExitCodeAndMarkerAgreeOnEveryFixtureProgram) {
  const std::map<int, std::string> expected = {
      {0, "PASS"}, {10, "TESTFAIL"}, {11, "RUNTIME"}, {12, "LOADFAIL"}};
  ScratchDir dir;
  size_t checked = 0;
  for (const auto& s : testing::LoadFixtureSolutions()) {
    if (checked >= 12) break;
    std::vector<std::string> programs = {AssembleProgram(s.correct[0], s.tests[0]),
                                         AssembleProgram(s.wrong[0], s.tests[0])};
    for (const auto& p : programs) {
      WriteFileAtomic(dir / "p.py", p);
      ShimRun r = RunShim(dir / "p.py");
      ASSERT_TRUE(expected.count(r.exit_code)) << r.exit_code;
      EXPECT_EQ(r.last_stderr_line.rfind("PLUM:" + expected.at(r.exit_code) + ":", 0), 0u);
      ++checked;
    }
  }
}

TEST(ShimProtocolTest, OverheadIsSmall) {
  ScratchDir dir;
  WriteFileAtomic(dir / "p.py", "x = 1\n");
  auto time = [&](std::vector<std::string> argv) {
    ProcessSpec spec;
    spec.argv = std::move(argv);
    double best = 1e9;
    for (int i = 0; i < 5; ++i) best = std::min(best, RunProcess(spec).duration_seconds);
    return best;
  };
  double direct = time({"python3", "-S", dir / "p.py"});
  double shim = time({"python3", "-S", PLUM_SHIM_SOURCE, dir / "p.py"});
  EXPECT_LT(shim - direct, 0.050) << "direct " << direct << " shim " << shim;
}

}  // namespace
}  // namespace plum
