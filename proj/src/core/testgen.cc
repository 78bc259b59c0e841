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

#include "plum/testgen.h"

#include <array>
#include <stdexcept>

#include "plum/util/parallel.h"
#include "spdlog/spdlog.h"

namespace plum {

const std::string_view kPromptPrefix =
    "You are a teaching assistant helping to write reference solutions and "
    "tests for programming questions.\n"
    "Given a programming question, you need to first analyze the problem,\n"
    "then write a reference solution (code), followed by assertions that test "
    "student solutions.\n"
    "The test code must be runnable when concatenated at the end of student "
    "solutions to\n"
    "check the correctness.\n"
    "\n"
    "Programming Question:\n";

const std::string_view kPromptSuffix =
    "\n"
    "\n"
    "Follow the format below:\n"
    "[Analysis]\n"
    "{Natural language analysis of the problem.}\n"
    "[Solution]\n"
    "{Your solution to the problem}\n"
    "[Start Code]\n"
    "{Start code for students so that they can follow the I/O protocol. E.g. "
    "Function signatures, class names etc.}\n"
    "[Test Code]\n"
    "{Test code that is immediately runnable if concatenated with student code "
    "to check the correctness.}\n";

namespace {

constexpr std::array<std::string_view, 4> kHeaders = {
    "[Analysis]", "[Solution]", "[Start Code]", "[Test Code]"};

bool IsDecoration(char c) {
  return c == ' ' || c == '\t' || c == '#' || c == '*' || c == ':' ||
         c == '`' || c == '\r';
}

struct HeaderHit {
  size_t line_start;  // where the header line begins
  size_t body_start;  // first byte after the header line
};

std::optional<HeaderHit> FindHeader(std::string_view raw, std::string_view header) {
  size_t pos = 0;
  while ((pos = raw.find(header, pos)) != std::string_view::npos) {
    size_t line_start = raw.rfind('\n', pos);
    line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
    size_t line_end = raw.find('\n', pos);
    if (line_end == std::string_view::npos) line_end = raw.size();
    bool clean = true;
    for (size_t i = line_start; i < pos && clean; ++i) clean = IsDecoration(raw[i]);
    for (size_t i = pos + header.size(); i < line_end && clean; ++i) {
      clean = IsDecoration(raw[i]);
    }
    if (clean) {
      return HeaderHit{line_start,
                       line_end == raw.size() ? line_end : line_end + 1};
    }
    pos += header.size();
  }
  return std::nullopt;
}

bool IsFenceLine(std::string_view line) {
  size_t i = line.find_first_not_of(" \t");
  return i != std::string_view::npos && line.substr(i, 3) == "```";
}

}  // namespace

ResponseParseError::ResponseParseError(Kind kind, std::string section)
    : std::runtime_error(kind == Kind::kMissingSection
                             ? "MissingSection(" + section + ")"
                             : "EmptyTestCode"),
      kind_(kind),
      section_(std::move(section)) {}

std::string RenderPrompt(const Instruction& instruction) {
  if (instruction.text.empty()) {
    throw std::invalid_argument("instruction text is empty");
  }
  std::string out(kPromptPrefix);
  out += instruction.text;
  out += kPromptSuffix;
  return out;
}

std::string TrimBlankLines(std::string_view text) {
  // Drop whole leading lines that are blank, keep indentation of the first
  // non-blank line.
  size_t start = 0;
  while (start < text.size()) {
    size_t eol = text.find('\n', start);
    std::string_view line =
        text.substr(start, eol == std::string_view::npos ? text.size() - start
                                                         : eol - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) break;
    if (eol == std::string_view::npos) return "";
    start = eol + 1;
  }
  size_t end = text.find_last_not_of(" \t\r\n");
  if (end == std::string_view::npos || end < start) return "";
  return std::string(text.substr(start, end + 1 - start));
}

bool ContainsFence(std::string_view text) {
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    if (IsFenceLine(text.substr(pos, eol - pos))) return true;
    pos = eol + 1;
  }
  return false;
}

std::string ExtractFencedCode(std::string_view text) {
  std::vector<std::string> blocks;
  size_t pos = 0;
  bool in_block = false;
  std::string current;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
    std::string_view line = text.substr(pos, next - pos);
    std::string_view bare = line;
    while (!bare.empty() && (bare.back() == '\n' || bare.back() == '\r')) {
      bare.remove_suffix(1);
    }
    if (IsFenceLine(bare)) {
      if (in_block) {
        blocks.push_back(TrimBlankLines(current));
        current.clear();
      }
      in_block = !in_block;
    } else if (in_block) {
      current += line;
    }
    pos = next;
  }
  if (in_block) blocks.push_back(TrimBlankLines(current));
  if (blocks.empty()) return TrimBlankLines(text);
  std::string out;
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += b;
  }
  return out;
}

ParsedResponse ParseResponse(std::string_view raw) {
  std::array<std::optional<HeaderHit>, 4> hits;
  for (size_t i = 0; i < kHeaders.size(); ++i) {
    hits[i] = FindHeader(raw, kHeaders[i]);
    if (!hits[i]) {
      throw ResponseParseError(ResponseParseError::Kind::kMissingSection,
                               std::string(kHeaders[i]));
    }
  }
  auto body = [&](size_t i) {
    size_t end = raw.size();
    for (size_t j = 0; j < hits.size(); ++j) {
      if (hits[j]->line_start >= hits[i]->body_start &&
          hits[j]->line_start < end) {
        end = hits[j]->line_start;
      }
    }
    size_t begin = std::min(hits[i]->body_start, end);
    return raw.substr(begin, end - begin);
  };
  ParsedResponse parsed;
  parsed.analysis = TrimBlankLines(body(0));
  parsed.reference_solution = ExtractFencedCode(body(1));
  parsed.starter_code = ExtractFencedCode(body(2));
  parsed.test_code = ExtractFencedCode(body(3));
  if (parsed.test_code.empty()) {
    throw ResponseParseError(ResponseParseError::Kind::kEmptyTestCode,
                             std::string(kHeaders[3]));
  }
  return parsed;
}

std::string FormatResponse(const ParsedResponse& parsed) {
  auto fenced = [](const std::string& code) {
    return "```python\n" + code + (code.empty() ? "" : "\n") + "```\n";
  };
  std::string out;
  out += "[Analysis]\n" + parsed.analysis + "\n";
  out += "[Solution]\n" + fenced(parsed.reference_solution);
  out += "[Start Code]\n" + fenced(parsed.starter_code);
  out += "[Test Code]\n" + fenced(parsed.test_code);
  return out;
}

GenerateResult Generate(const Instruction& instruction,
                        const GeneratorConfig& config,
                        CompletionBackend& backend) {
  CompletionRequest request;
  request.instruction_id = instruction.id;
  request.prompt = RenderPrompt(instruction);
  request.temperature = config.temperature;
  request.max_tokens = config.max_tokens;
  request.count = static_cast<size_t>(std::max(1, config.n_per_instruction));
  std::vector<std::string> responses = backend.Complete(request);
  GenerateResult result;
  result.responses = static_cast<int>(responses.size());
  for (size_t i = 0; i < responses.size(); ++i) {
    try {
      ParsedResponse parsed = ParseResponse(responses[i]);
      TestArtifact a;
      a.instruction_id = instruction.id;
      a.gen_index = static_cast<int>(i);
      a.analysis = std::move(parsed.analysis);
      a.reference_solution = std::move(parsed.reference_solution);
      a.starter_code = std::move(parsed.starter_code);
      a.test_code = std::move(parsed.test_code);
      result.artifacts.push_back(std::move(a));
    } catch (const ResponseParseError& e) {
      ++result.parse_failures;
      spdlog::debug("{} response {}: {}", instruction.id, i, e.what());
    }
  }
  if (result.parse_failures > 0) {
    spdlog::info("{}: {} of {} generator responses unparseable", instruction.id,
                 result.parse_failures, result.responses);
  }
  return result;
}

std::vector<GenerateResult> GenerateAll(const std::vector<Instruction>& instructions,
                                        const GeneratorConfig& config,
                                        CompletionBackend& backend) {
  std::vector<GenerateResult> results(instructions.size());
  ParallelFor(instructions.size(), config.max_in_flight, [&](size_t i) {
    results[i] = Generate(instructions[i], config, backend);
  });
  return results;
}

Json ToJson(const TestArtifact& a) {
  Json j;
  j["instruction_id"] = a.instruction_id;
  j["gen_index"] = a.gen_index;
  j["analysis"] = a.analysis;
  j["reference_solution"] = a.reference_solution;
  j["starter_code"] = a.starter_code;
  j["test_code"] = a.test_code;
  j["consistent"] = a.consistent ? Json(*a.consistent) : Json(nullptr);
  return j;
}

TestArtifact TestArtifactFromJson(const Json& j) {
  TestArtifact a;
  a.instruction_id = j.at("instruction_id").get<std::string>();
  a.gen_index = j.at("gen_index").get<int>();
  a.analysis = j.value("analysis", "");
  a.reference_solution = j.value("reference_solution", "");
  a.starter_code = j.value("starter_code", "");
  a.test_code = j.at("test_code").get<std::string>();
  if (j.contains("consistent") && j["consistent"].is_boolean()) {
    a.consistent = j["consistent"].get<bool>();
  }
  return a;
}

GeneratorConfig GeneratorConfigFromJson(const Json& j, const std::string& base_dir) {
  GeneratorConfig c;
  c.backend = BackendConfigFromJson(j, base_dir);
  c.n_per_instruction = j.value("n_per_instruction", c.n_per_instruction);
  c.temperature = j.value("temperature", c.temperature);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  if (c.n_per_instruction < 1) throw std::invalid_argument("testgen.n_per_instruction must be >= 1");
  if (c.max_tokens < 1) throw std::invalid_argument("testgen.max_tokens must be >= 1");
  if (c.temperature < 0) throw std::invalid_argument("testgen.temperature must be >= 0");
  return c;
}

}  // namespace plum
