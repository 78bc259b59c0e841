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

#include "plum/corpus.h"

#include <set>
#include <unordered_set>

#include "plum/util/hash.h"
#include "plum/util/rng.h"

namespace plum {

LoadResult LoadInstructions(const std::string& path,
                            const LoadOptions& options) {
  LoadResult result;
  std::vector<JsonlRecord> records;
  try {
    records = ReadJsonl(path, options.strict
                                  ? std::function<void(const JsonlError&)>()
                                  : [&](const JsonlError& e) {
                                      result.warnings.push_back(e.what());
                                    });
  } catch (const JsonlError& e) {
    throw CorpusError(e.what());
  } catch (const IoError& e) {
    throw CorpusError(e.what());
  }

  std::set<std::string> ids;
  std::unordered_set<std::string> texts;
  for (auto& record : records) {
    auto reject = [&](const std::string& why) {
      std::string msg = path + ":" + std::to_string(record.line) + ": " + why;
      if (options.strict) throw CorpusError(msg);
      result.warnings.push_back(msg);
    };
    const Json& v = record.value;
    auto text_it = v.find("instruction");
    if (text_it == v.end() || !text_it->is_string()) {
      reject("missing string field 'instruction'");
      continue;
    }
    Instruction ins;
    ins.text = text_it->get<std::string>();
    if (ins.text.empty()) {
      reject("empty instruction text");
      continue;
    }
    auto src_it = v.find("source");
    if (src_it != v.end() && !src_it->is_string()) {
      reject("field 'source' is not a string");
      continue;
    }
    ins.source = src_it != v.end() ? src_it->get<std::string>() : options.source_tag;
    auto id_it = v.find("id");
    if (id_it != v.end() && !id_it->is_null()) {
      if (!id_it->is_string() || id_it->get<std::string>().empty()) {
        reject("field 'id' is not a non-empty string");
        continue;
      }
      ins.id = id_it->get<std::string>();
    } else {
      ins.id = ins.source + ":" + std::to_string(record.line) + ":" +
               Hex8(Fnv1a32(ins.text));
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it.key() != "id" && it.key() != "instruction" && it.key() != "source") {
        ins.metadata[it.key()] = it.value();
      }
    }
    if (options.dedup && !texts.insert(ins.text).second) {
      result.warnings.push_back(path + ":" + std::to_string(record.line) +
                                ": duplicate text dropped");
      continue;
    }
    if (!ids.insert(ins.id).second) {
      throw CorpusError(path + ":" + std::to_string(record.line) +
                        ": duplicate id '" + ins.id + "'");
    }
    result.instructions.push_back(std::move(ins));
  }
  return result;
}

std::vector<Instruction> Subsample(const std::vector<Instruction>& instructions,
                                   size_t n, uint64_t seed) {
  if (n >= instructions.size()) return instructions;
  Rng rng(seed);
  std::vector<Instruction> out;
  out.reserve(n);
  for (size_t i : rng.SampleIndices(instructions.size(), n)) {
    out.push_back(instructions[i]);
  }
  return out;
}

std::vector<Chunk> MakeChunks(const std::vector<Instruction>& instructions,
                              size_t m) {
  if (m == 0) throw CorpusError("chunk size must be at least 1");
  std::vector<Chunk> chunks;
  for (size_t start = 0; start < instructions.size(); start += m) {
    Chunk c;
    c.index = chunks.size();
    size_t end = std::min(instructions.size(), start + m);
    c.instructions.assign(instructions.begin() + start,
                          instructions.begin() + end);
    chunks.push_back(std::move(c));
  }
  return chunks;
}

Json ToJson(const Instruction& instruction) {
  Json j;
  j["id"] = instruction.id;
  j["instruction"] = instruction.text;
  j["source"] = instruction.source;
  for (auto it = instruction.metadata.begin(); it != instruction.metadata.end();
       ++it) {
    j[it.key()] = it.value();
  }
  return j;
}

Instruction InstructionFromJson(const Json& j) {
  Instruction ins;
  ins.id = j.at("id").get<std::string>();
  ins.text = j.at("instruction").get<std::string>();
  ins.source = j.value("source", "");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "id" && it.key() != "instruction" && it.key() != "source") {
      ins.metadata[it.key()] = it.value();
    }
  }
  return ins;
}

}  // namespace plum
