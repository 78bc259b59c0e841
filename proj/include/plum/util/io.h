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

#ifndef PLUM_UTIL_IO_H_
#define PLUM_UTIL_IO_H_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace plum {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line that is not a JSON object. `line` is 1-based.
class JsonlError : public std::runtime_error {
 public:
  JsonlError(const std::string& path, size_t line, const std::string& what);
  size_t line() const { return line_; }

 private:
  size_t line_;
};

std::string ReadFile(const std::string& path);

// Writes through a sibling temporary file and rename(2), so readers never
// observe a partial file.
void WriteFileAtomic(const std::string& path, const std::string& content);

struct JsonlRecord {
  size_t line;  // 1-based
  Json value;
};

// Parses a JSON-lines file; blank lines are ignored. A malformed line
// throws JsonlError unless `on_error` is given, in which case it is
// reported there and skipped.
std::vector<JsonlRecord> ReadJsonl(
    const std::string& path,
    const std::function<void(const JsonlError&)>& on_error = nullptr);

std::string ToJsonl(const std::vector<Json>& records);

void WriteJsonl(const std::string& path, const std::vector<Json>& records);

// Creates the directory and its parents if needed.
void MakeDirs(const std::string& path);

bool FileExists(const std::string& path);

// Resolves `path` against `base_dir` unless it is absolute or empty.
std::string ResolvePath(const std::string& base_dir, const std::string& path);

}  // namespace plum

#endif  // PLUM_UTIL_IO_H_
