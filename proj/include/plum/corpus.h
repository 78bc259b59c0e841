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

#ifndef PLUM_CORPUS_H_
#define PLUM_CORPUS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "plum/util/io.h"

namespace plum {

struct Instruction {
  std::string id;
  std::string text;
  std::string source;
  Json metadata = Json::object();  // keys other than id/instruction/source
};

struct Chunk {
  size_t index = 0;
  std::vector<Instruction> instructions;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  std::string source_tag;  // used when a record has no `source`
  bool strict = false;     // abort on the first malformed record
  bool dedup = false;      // drop later records with identical text
};

struct LoadResult {
  std::vector<Instruction> instructions;
  std::vector<std::string> warnings;
};

// Reads `instructions.jsonl`. Missing ids become
// "{source}:{line}:{fnv1a32(text) as 8 hex}". Duplicate ids are an error
// in both modes.
LoadResult LoadInstructions(const std::string& path, const LoadOptions& options);

// min(n, size) instructions, uniform without replacement, original order.
std::vector<Instruction> Subsample(const std::vector<Instruction>& instructions,
                                   size_t n, uint64_t seed);

// Throws CorpusError for m == 0.
std::vector<Chunk> MakeChunks(const std::vector<Instruction>& instructions,
                              size_t m);

Json ToJson(const Instruction& instruction);
Instruction InstructionFromJson(const Json& j);

}  // namespace plum

#endif  // PLUM_CORPUS_H_
