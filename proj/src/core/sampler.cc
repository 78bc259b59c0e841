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

#include "plum/sampler.h"

#include <stdexcept>
#include <utility>

#include "plum/util/parallel.h"
#include "spdlog/spdlog.h"

namespace plum {
namespace {

// Single pass, so slot text inside substituted values is left alone.
std::string Substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string_view, std::string_view>>& slots) {
  std::string out;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    bool matched = false;
    if (tmpl[pos] == '{') {
      for (const auto& [name, value] : slots) {
        if (tmpl.substr(pos, name.size()) == name) {
          out += value;
          pos += name.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += tmpl[pos++];
  }
  return out;
}

}  // namespace

std::string BuildPolicyPrompt(const Instruction& instruction,
                              std::string_view starter_code,
                              const SamplingConfig& config) {
  std::string starter_block;
  if (config.include_starter_code && !starter_code.empty()) {
    starter_block = Substitute(config.starter_template, {{"{starter_code}", starter_code}});
  }
  return Substitute(config.prompt_template,
                    {{"{instruction}", instruction.text}, {"{starter}", starter_block}});
}

std::string StarterFor(const std::vector<TestArtifact>& artifacts) {
  for (const auto& a : artifacts) {
    if (a.consistent.value_or(false) && !a.starter_code.empty()) return a.starter_code;
  }
  return "";
}

std::string ExtractCode(std::string_view raw_completion) {
  if (!ContainsFence(raw_completion)) return std::string(raw_completion);
  return ExtractFencedCode(raw_completion);
}

std::vector<CandidateSolution> Sample(const Instruction& instruction,
                                      const std::string& prompt,
                                      const SamplingConfig& config,
                                      CompletionBackend& backend) {
  CompletionRequest request;
  request.instruction_id = instruction.id;
  request.prompt = prompt;
  request.temperature = config.temperature;
  request.max_tokens = config.max_tokens;
  request.count = static_cast<size_t>(config.k);
  std::vector<std::string> texts = backend.Complete(request);
  if (texts.size() > request.count) texts.resize(request.count);
  if (texts.size() < request.count) {
    spdlog::warn("{}: policy returned {} of {} completions", instruction.id,
                 texts.size(), request.count);
  }
  std::vector<CandidateSolution> out;
  out.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    CandidateSolution c;
    c.instruction_id = instruction.id;
    c.candidate_id = static_cast<int>(i);
    c.code = ExtractCode(texts[i]);
    c.raw_completion = std::move(texts[i]);
    c.temperature = config.temperature;
    c.seed = config.seed;
    c.policy_identifier = config.policy_identifier;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<CandidateSolution>> SampleAll(
    const std::vector<Instruction>& instructions,
    const std::vector<std::string>& prompts, const SamplingConfig& config,
    CompletionBackend& backend) {
  if (prompts.size() != instructions.size()) {
    throw std::invalid_argument("prompt/instruction count mismatch");
  }
  std::vector<std::vector<CandidateSolution>> out(instructions.size());
  ParallelFor(instructions.size(), config.max_in_flight, [&](size_t i) {
    out[i] = Sample(instructions[i], prompts[i], config, backend);
  });
  return out;
}

Json ToJson(const CandidateSolution& c) {
  Json j;
  j["instruction_id"] = c.instruction_id;
  j["candidate_id"] = c.candidate_id;
  j["code"] = c.code;
  j["raw_completion"] = c.raw_completion;
  j["sampling"] = {{"temperature", c.temperature},
                   {"seed", c.seed},
                   {"policy_identifier", c.policy_identifier}};
  return j;
}

CandidateSolution CandidateFromJson(const Json& j) {
  CandidateSolution c;
  c.instruction_id = j.at("instruction_id").get<std::string>();
  c.candidate_id = j.at("candidate_id").get<int>();
  c.code = j.at("code").get<std::string>();
  c.raw_completion = j.value("raw_completion", c.code);
  if (j.contains("sampling")) {
    const Json& s = j["sampling"];
    c.temperature = s.value("temperature", 0.0);
    c.seed = s.value("seed", uint64_t{0});
    c.policy_identifier = s.value("policy_identifier", "");
  }
  return c;
}

SamplingConfig SamplingConfigFromJson(const Json& j, const std::string& base_dir) {
  SamplingConfig c;
  c.backend = BackendConfigFromJson(j, base_dir);
  c.k = j.value("k", c.k);
  c.temperature = j.value("temperature", c.temperature);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.seed = j.value("seed", c.seed);
  c.policy_identifier = j.value("policy_identifier", c.policy_identifier);
  c.include_starter_code = j.value("include_starter_code", c.include_starter_code);
  c.prompt_template = j.value("prompt_template", c.prompt_template);
  c.starter_template = j.value("starter_template", c.starter_template);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  if (c.k < 1) throw std::invalid_argument("sampler.k must be >= 1");
  if (c.temperature < 0) throw std::invalid_argument("sampler.temperature must be >= 0");
  return c;
}

}  // namespace plum
