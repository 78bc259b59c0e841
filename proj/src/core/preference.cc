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

#include "plum/preference.h"

#include <cmath>
#include <map>

#include "plum/util/hash.h"
#include "plum/util/rng.h"
#include "spdlog/spdlog.h"

namespace plum {
namespace {

constexpr uint64_t kKtoBalanceKey = 0x6b746f2d62616cULL;

}  // namespace

std::string CandidateKey(const CandidateSolution& candidate) {
  return candidate.instruction_id + "#c" + std::to_string(candidate.candidate_id);
}

std::string TestKey(const TestArtifact& test) {
  return test.instruction_id + "#t" + std::to_string(test.gen_index);
}

std::vector<LabeledCandidate> Label(const std::vector<CandidateSolution>& candidates,
                                    const std::vector<bool>& runnable,
                                    const std::vector<std::string>& reasons,
                                    const std::vector<TestArtifact>& tests,
                                    const OutcomeMap& outcomes) {
  if (runnable.size() != candidates.size() || reasons.size() != candidates.size()) {
    throw std::invalid_argument("runnable/candidate count mismatch");
  }
  std::map<std::string, std::vector<const TestArtifact*>> tests_by_id;
  for (const auto& t : tests) tests_by_id[t.instruction_id].push_back(&t);

  std::vector<LabeledCandidate> out;
  out.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    LabeledCandidate lc;
    lc.candidate = candidates[i];
    lc.runnable = runnable[i];
    if (!lc.runnable) {
      lc.unrunnable_reason = reasons[i];
      out.push_back(std::move(lc));
      continue;
    }
    std::string ckey = CandidateKey(candidates[i]);
    bool all_pass = true;
    auto it = tests_by_id.find(candidates[i].instruction_id);
    if (it != tests_by_id.end()) {
      for (const TestArtifact* t : it->second) {
        std::string tkey = TestKey(*t);
        auto o = outcomes.find({ckey, tkey});
        if (o == outcomes.end()) {
          throw LabelError("missing outcome for " + ckey + " x " + tkey);
        }
        lc.per_test.emplace_back(tkey, o->second.status);
        all_pass = all_pass && o->second.status == ExecStatus::kPass;
      }
    }
    lc.passed_all = all_pass;
    out.push_back(std::move(lc));
  }
  return out;
}

bool IsPositive(const LabeledCandidate& c) { return c.runnable && c.passed_all; }

bool IsNegative(const LabeledCandidate& c, bool include_unrunnable) {
  if (!c.runnable) return include_unrunnable;
  return !c.passed_all;
}

size_t CountPositives(const InstructionGroup& g) {
  size_t n = 0;
  for (const auto& c : g.candidates) n += IsPositive(c);
  return n;
}

size_t CountNegatives(const InstructionGroup& g, bool include_unrunnable) {
  size_t n = 0;
  for (const auto& c : g.candidates) n += IsNegative(c, include_unrunnable);
  return n;
}

size_t CountUnrunnable(const InstructionGroup& g) {
  size_t n = 0;
  for (const auto& c : g.candidates) n += !c.runnable;
  return n;
}

FilteredGroups FilterNoPositive(std::vector<InstructionGroup> groups,
                                const PreferenceConfig& config) {
  FilteredGroups out;
  for (auto& g : groups) {
    if (CountPositives(g) == 0) {
      out.dropped_no_positive.push_back(g.instruction_id);
      continue;
    }
    if (CountNegatives(g, config.include_unrunnable_negatives) == 0) {
      out.dpo_skipped_no_negative.push_back(g.instruction_id);
    } else {
      out.dpo.push_back(g);
    }
    out.kto.push_back(std::move(g));
  }
  return out;
}

DpoBuild BuildDpo(const std::vector<InstructionGroup>& groups,
                  const PreferenceConfig& config) {
  DpoBuild build;
  for (const auto& g : groups) {
    std::vector<const LabeledCandidate*> pos;
    std::vector<const LabeledCandidate*> neg;
    for (const auto& c : g.candidates) {
      if (IsPositive(c)) pos.push_back(&c);
      else if (IsNegative(c, config.include_unrunnable_negatives)) neg.push_back(&c);
    }
    Rng rng(DeriveSeed(config.seed, Fnv1a64(g.instruction_id)));
    rng.Shuffle(pos);
    rng.Shuffle(neg);
    size_t n = std::min(pos.size(), neg.size());
    size_t emitted = 0;
    for (size_t i = 0; i < n; ++i) {
      if (config.max_pairs_per_instruction && emitted >= *config.max_pairs_per_instruction) {
        break;
      }
      if (pos[i]->candidate.code == neg[i]->candidate.code) {
        ++build.identical_skipped;
        continue;
      }
      build.pairs.push_back(
          {g.instruction_id, g.prompt, pos[i]->candidate.code, neg[i]->candidate.code});
      ++emitted;
    }
  }
  if (build.identical_skipped > 0) {
    spdlog::warn("dpo: skipped {} pairs with identical chosen/rejected text",
                 build.identical_skipped);
  }
  return build;
}

std::vector<KtoRecord> BuildKto(const std::vector<InstructionGroup>& groups,
                                const PreferenceConfig& config) {
  std::vector<KtoRecord> all;
  for (const auto& g : groups) {
    for (const auto& c : g.candidates) {
      bool pos = IsPositive(c);
      if (!pos && !IsNegative(c, config.include_unrunnable_negatives)) continue;
      all.push_back({g.instruction_id, g.prompt, c.candidate.code, pos});
    }
  }
  if (!config.kto_balance_ratio) return all;
  double ratio = *config.kto_balance_ratio;
  if (!(ratio > 0)) throw std::invalid_argument("kto balance ratio must be > 0");
  std::vector<size_t> des;
  std::vector<size_t> und;
  for (size_t i = 0; i < all.size(); ++i) (all[i].desirable ? des : und).push_back(i);
  if (des.empty() || und.empty()) {
    spdlog::warn("kto: one label class is empty; balancing skipped");
    return all;
  }
  // Keep the smaller side whole and cut the other to the target ratio.
  size_t keep_des = des.size();
  size_t keep_und = und.size();
  double ideal_des = ratio * static_cast<double>(und.size());
  if (static_cast<double>(des.size()) > ideal_des) {
    keep_des = std::max<size_t>(1, static_cast<size_t>(std::floor(ideal_des)));
  } else {
    keep_und = std::max<size_t>(
        1, static_cast<size_t>(std::floor(static_cast<double>(des.size()) / ratio)));
    keep_und = std::min(keep_und, und.size());
  }
  Rng rng(DeriveSeed(config.seed, kKtoBalanceKey));
  std::vector<bool> keep(all.size(), false);
  for (size_t k : rng.SampleIndices(des.size(), keep_des)) keep[des[k]] = true;
  for (size_t k : rng.SampleIndices(und.size(), keep_und)) keep[und[k]] = true;
  std::vector<KtoRecord> out;
  for (size_t i = 0; i < all.size(); ++i) {
    if (keep[i]) out.push_back(std::move(all[i]));
  }
  return out;
}

std::optional<double> PassRatio(const InstructionGroup& group) {
  if (group.candidates.empty()) return std::nullopt;
  return static_cast<double>(CountPositives(group)) /
         static_cast<double>(group.candidates.size());
}

Json ToJson(const LabeledCandidate& c) {
  Json j = ToJson(c.candidate);
  j["runnable"] = c.runnable;
  j["passed_all"] = c.passed_all;
  if (!c.runnable) j["unrunnable_reason"] = c.unrunnable_reason;
  Json per = Json::object();
  for (const auto& [key, status] : c.per_test) per[key] = std::string(StatusName(status));
  j["per_test"] = per;
  return j;
}

LabeledCandidate LabeledFromJson(const Json& j) {
  LabeledCandidate c;
  c.candidate = CandidateFromJson(j);
  c.runnable = j.at("runnable").get<bool>();
  c.passed_all = j.at("passed_all").get<bool>();
  c.unrunnable_reason = j.value("unrunnable_reason", "");
  if (j.contains("per_test")) {
    for (const auto& [key, status] : j["per_test"].items()) {
      c.per_test.emplace_back(key, StatusFromName(status.get<std::string>()));
    }
  }
  return c;
}

Json ToJson(const DpoPair& p) {
  Json j;
  j["instruction_id"] = p.instruction_id;
  j["prompt"] = p.prompt;
  j["chosen"] = p.chosen;
  j["rejected"] = p.rejected;
  return j;
}

Json ToJson(const KtoRecord& r) {
  Json j;
  j["instruction_id"] = r.instruction_id;
  j["prompt"] = r.prompt;
  j["completion"] = r.completion;
  j["label"] = r.desirable ? "desirable" : "undesirable";
  return j;
}

void WriteDpo(const std::string& path, const std::vector<DpoPair>& pairs) {
  std::vector<Json> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) rows.push_back(ToJson(p));
  WriteJsonl(path, rows);
}

void WriteKto(const std::string& path, const std::vector<KtoRecord>& records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(ToJson(r));
  WriteJsonl(path, rows);
}

PreferenceConfig PreferenceConfigFromJson(const Json& j) {
  PreferenceConfig c;
  c.seed = j.value("seed", c.seed);
  if (j.contains("max_pairs_per_instruction") && !j["max_pairs_per_instruction"].is_null()) {
    c.max_pairs_per_instruction = j["max_pairs_per_instruction"].get<size_t>();
  }
  c.include_unrunnable_negatives =
      j.value("include_unrunnable_negatives", c.include_unrunnable_negatives);
  if (j.contains("kto_balance_ratio") && !j["kto_balance_ratio"].is_null()) {
    c.kto_balance_ratio = j["kto_balance_ratio"].get<double>();
    if (!(*c.kto_balance_ratio > 0)) {
      throw std::invalid_argument("preference.kto_balance_ratio must be > 0");
    }
  }
  return c;
}

}  // namespace plum
