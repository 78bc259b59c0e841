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

#ifndef PLUM_BACKEND_H_
#define PLUM_BACKEND_H_

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "plum/util/io.h"

namespace plum {

class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StubMiss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompletionRequest {
  std::string instruction_id;  // stub lookup key
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 4096;
  size_t count = 1;  // completions wanted
};

// Implementations must be safe to call from several threads at once.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Up to request.count texts, in backend order. Fewer is a shortfall, not
  // an error.
  virtual std::vector<std::string> Complete(const CompletionRequest& request) = 0;
};

struct BackendConfig {
  std::string kind = "stub";  // "stub" or "http"
  std::string stub_path;
  std::string endpoint;  // e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string model;
  std::string api_key_env;  // name of the variable holding the bearer token
  double timeout_seconds = 120;
  int max_attempts = 3;
  int initial_backoff_ms = 500;
  // Ask for all completions in one request through an `n` field instead of
  // issuing one request per completion.
  bool use_n_field = false;
};

// Line-delimited `{"instruction_id": ..., "<field>": [text, ...]}`.
class StubBackend : public CompletionBackend {
 public:
  StubBackend(const std::string& path, const std::string& field);
  std::vector<std::string> Complete(const CompletionRequest& request) override;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// Chat-completions style JSON over HTTP(S), retried with exponential
// backoff on transport errors, 429 and 5xx.
class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(BackendConfig config);
  std::vector<std::string> Complete(const CompletionRequest& request) override;

  // Request body for `count` completions (exposed for tests).
  Json RequestBody(const CompletionRequest& request, size_t count) const;

 private:
  std::vector<std::string> Post(const Json& body);

  BackendConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

// `stub_field` names the stub file's list key ("responses" for test
// generation, "completions" for the policy).
std::unique_ptr<CompletionBackend> MakeBackend(const BackendConfig& config,
                                               const std::string& stub_field);

BackendConfig BackendConfigFromJson(const Json& j, const std::string& base_dir);

}  // namespace plum

#endif  // PLUM_BACKEND_H_
