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

#ifndef PLUM_TESTS_SUPPORT_FIXTURES_H_
#define PLUM_TESTS_SUPPORT_FIXTURES_H_

#include <string>
#include <vector>

#include "plum/pipeline.h"
#include "plum/util/io.h"

namespace plum::testing {

// tests/fixtures in the source tree.
std::string FixtureDir();

// A fresh directory removed on destruction.
class ScratchDir {
 public:
  ScratchDir();
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::string& path() const { return path_; }
  std::string operator/(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

// Source-tree shim, fast interpreter start-up, 2 s limit.
SandboxConfig FastSandbox(int parallelism = 4);

// Pipeline config over the fixture corpus with absolute data paths and
// work/out under `dir`; `patch` is merged on top (RFC 7386).
Json FixtureConfig(const std::string& dir, const Json& patch = Json::object());

// Writes FixtureConfig to dir/plum.json and returns that path.
std::string WriteFixtureConfig(const std::string& dir, const Json& patch = Json::object());

struct FixtureSolution {
  std::string instruction_id;
  std::string name;
  bool solved = false;
  std::vector<std::string> correct;
  std::vector<std::string> wrong;
  std::vector<std::string> tests;
};

std::vector<FixtureSolution> LoadFixtureSolutions();

std::vector<Instruction> LoadFixtureInstructions();

std::vector<std::string> ReadLines(const std::string& path);

}  // namespace plum::testing

#endif  // PLUM_TESTS_SUPPORT_FIXTURES_H_
