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

#include "support/fixtures.h"

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace plum::testing {

std::string FixtureDir() { return PLUM_FIXTURE_DIR; }

ScratchDir::ScratchDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "plum-test-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

SandboxConfig FastSandbox(int parallelism) {
  SandboxConfig c;
  c.interpreter_args = {"-S"};
  c.time_limit_seconds = 2.0;
  c.parallelism = parallelism;
  return c;
}

Json FixtureConfig(const std::string& dir, const Json& patch) {
  std::string data = FixtureDir() + "/data";
  Json c = {
      {"corpus", {{"path", data + "/instructions.jsonl"}, {"source_tag", "fixture"}}},
      {"testgen",
       {{"backend", "stub"}, {"stub_path", data + "/testgen_stub.jsonl"}, {"n_per_instruction", 3}}},
      {"sampler",
       {{"backend", "stub"},
        {"stub_path", data + "/policy_stub.jsonl"},
        {"k", 7},
        {"seed", 7},
        {"policy_identifier", "policy-0"}}},
      {"sandbox",
       {{"interpreter_args", {"-S"}},
        {"time_limit_seconds", 2},
        {"parallelism", 8},
        {"short_circuit", true}}},
      {"preference", {{"seed", 11}, {"kto_balance_ratio", 1.0}}},
      {"mutation", {{"enabled", false}, {"seed", 5}}},
      {"pipeline",
       {{"work_dir", dir + "/work"}, {"output_dir", dir + "/out"}, {"chunk_size", 5}}},
      {"report", {{"dataset_name", "fixture"}}},
  };
  c.merge_patch(patch);
  return c;
}

std::string WriteFixtureConfig(const std::string& dir, const Json& patch) {
  std::string path = dir + "/plum.json";
  WriteFileAtomic(path, FixtureConfig(dir, patch).dump(2) + "\n");
  return path;
}

std::vector<FixtureSolution> LoadFixtureSolutions() {
  std::vector<FixtureSolution> out;
  for (const auto& r : ReadJsonl(FixtureDir() + "/data/solutions.jsonl")) {
    const Json& j = r.value;
    out.push_back({j.at("instruction_id").get<std::string>(), j.at("name").get<std::string>(),
                   j.at("solved").get<bool>(), j.at("correct").get<std::vector<std::string>>(),
                   j.at("wrong").get<std::vector<std::string>>(),
                   j.at("tests").get<std::vector<std::string>>()});
  }
  return out;
}

std::vector<Instruction> LoadFixtureInstructions() {
  LoadOptions options;
  options.source_tag = "fixture";
  return LoadInstructions(FixtureDir() + "/data/instructions.jsonl", options).instructions;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace plum::testing
