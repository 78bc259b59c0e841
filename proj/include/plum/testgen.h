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

#ifndef PLUM_TESTGEN_H_
#define PLUM_TESTGEN_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plum/backend.h"
#include "plum/corpus.h"
#include "plum/util/io.h"

namespace plum {

inline constexpr std::string_view kPromptVersion = "plum-testgen-v1";

// Text before and after the `{Question}` slot.
extern const std::string_view kPromptPrefix;
extern const std::string_view kPromptSuffix;

struct TestArtifact {
  std::string instruction_id;
  int gen_index = 0;
  std::string analysis;
  std::string reference_solution;
  std::string starter_code;
  std::string test_code;
  std::optional<bool> consistent;
};

struct ParsedResponse {
  std::string analysis;
  std::string reference_solution;
  std::string starter_code;
  std::string test_code;
};

class ResponseParseError : public std::runtime_error {
 public:
  enum class Kind { kMissingSection, kEmptyTestCode };
  ResponseParseError(Kind kind, std::string section);
  Kind kind() const { return kind_; }
  const std::string& section() const { return section_; }

 private:
  Kind kind_;
  std::string section_;
};

struct GeneratorConfig {
  BackendConfig backend;
  int n_per_instruction = 3;
  double temperature = 0.0;
  int max_tokens = 4096;
  int max_in_flight = 4;
};

struct GenerateResult {
  std::vector<TestArtifact> artifacts;
  int parse_failures = 0;
  int responses = 0;
};

// Throws std::invalid_argument for an empty instruction.
std::string RenderPrompt(const Instruction& instruction);

// Sections are located by header name, in any order. A header counts only
// when it is the only thing on its line apart from markdown decoration.
ParsedResponse ParseResponse(std::string_view raw);

// Inverse of ParseResponse for code without fences of its own.
std::string FormatResponse(const ParsedResponse& parsed);

// Concatenated bodies of fenced blocks (joined by a blank line), or the
// whole text when there are none; outer blank lines trimmed.
std::string ExtractFencedCode(std::string_view text);

// True if any line opens a ``` fence.
bool ContainsFence(std::string_view text);

std::string TrimBlankLines(std::string_view text);

GenerateResult Generate(const Instruction& instruction,
                        const GeneratorConfig& config,
                        CompletionBackend& backend);

// Generate over many instructions with up to config.max_in_flight
// concurrent backend calls. Output order follows the input.
std::vector<GenerateResult> GenerateAll(const std::vector<Instruction>& instructions,
                                        const GeneratorConfig& config,
                                        CompletionBackend& backend);

Json ToJson(const TestArtifact& artifact);
TestArtifact TestArtifactFromJson(const Json& j);

GeneratorConfig GeneratorConfigFromJson(const Json& j, const std::string& base_dir);

}  // namespace plum

#endif  // PLUM_TESTGEN_H_
