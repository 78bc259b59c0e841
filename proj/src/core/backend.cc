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

#include "plum/backend.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "spdlog/spdlog.h"

namespace plum {

StubBackend::StubBackend(const std::string& path, const std::string& field) {
  std::vector<JsonlRecord> records;
  try {
    records = ReadJsonl(path);
  } catch (const std::exception& e) {
    throw BackendUnavailable(std::string("stub backend: ") + e.what());
  }
  for (const auto& r : records) {
    auto id = r.value.find("instruction_id");
    auto list = r.value.find(field);
    if (id == r.value.end() || !id->is_string() || list == r.value.end() ||
        !list->is_array()) {
      throw BackendUnavailable(path + ":" + std::to_string(r.line) +
                               ": expected instruction_id and '" + field + "'");
    }
    std::vector<std::string> texts;
    for (const auto& t : *list) {
      if (!t.is_string()) {
        throw BackendUnavailable(path + ":" + std::to_string(r.line) +
                                 ": non-string entry in '" + field + "'");
      }
      texts.push_back(t.get<std::string>());
    }
    entries_[id->get<std::string>()] = std::move(texts);
  }
}

std::vector<std::string> StubBackend::Complete(const CompletionRequest& request) {
  auto it = entries_.find(request.instruction_id);
  if (it == entries_.end()) {
    throw StubMiss("stub has no entry for instruction '" +
                   request.instruction_id + "'");
  }
  const auto& texts = it->second;
  size_t n = std::min(request.count, texts.size());
  return std::vector<std::string>(texts.begin(), texts.begin() + n);
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw BackendUnavailable("endpoint must be an http(s) URL: " + url);
  }
  size_t path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

Json HttpBackend::RequestBody(const CompletionRequest& request,
                              size_t count) const {
  Json body;
  if (!config_.model.empty()) body["model"] = config_.model;
  body["messages"] = Json::array({Json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (count > 1) body["n"] = count;
  return body;
}

std::vector<std::string> HttpBackend::Post(const Json& body) {
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  std::string payload = body.dump();
  std::string last_error;
  int backoff = config_.initial_backoff_ms;
  for (int attempt = 1; attempt <= std::max(1, config_.max_attempts); ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(base_);
    auto secs = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(secs));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(secs));
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      spdlog::warn("backend {} attempt {}: {}", base_, attempt, last_error);
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      spdlog::warn("backend {} attempt {}: {}", base_, attempt, last_error);
      continue;
    }
    if (res->status != 200) {
      throw BackendUnavailable("HTTP " + std::to_string(res->status) + " from " +
                               config_.endpoint);
    }
    Json reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array()) {
      throw BackendUnavailable("malformed reply from " + config_.endpoint);
    }
    std::vector<std::string> texts;
    for (const auto& choice : reply["choices"]) {
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        texts.push_back(choice["message"]["content"].get<std::string>());
      } else if (choice.contains("text") && choice["text"].is_string()) {
        texts.push_back(choice["text"].get<std::string>());
      }
    }
    return texts;
  }
  throw BackendUnavailable(config_.endpoint + ": " + last_error + " after " +
                           std::to_string(config_.max_attempts) + " attempts");
}

std::vector<std::string> HttpBackend::Complete(const CompletionRequest& request) {
  if (config_.use_n_field) {
    std::vector<std::string> texts = Post(RequestBody(request, request.count));
    if (texts.size() > request.count) texts.resize(request.count);
    return texts;
  }
  std::vector<std::string> texts;
  for (size_t i = 0; i < request.count; ++i) {
    std::vector<std::string> one = Post(RequestBody(request, 1));
    if (!one.empty()) texts.push_back(std::move(one.front()));
  }
  return texts;
}

std::unique_ptr<CompletionBackend> MakeBackend(const BackendConfig& config,
                                               const std::string& stub_field) {
  if (config.kind == "stub") {
    return std::make_unique<StubBackend>(config.stub_path, stub_field);
  }
  if (config.kind == "http") return std::make_unique<HttpBackend>(config);
  throw BackendUnavailable("unknown backend kind '" + config.kind + "'");
}

BackendConfig BackendConfigFromJson(const Json& j, const std::string& base_dir) {
  BackendConfig c;
  c.kind = j.value("backend", c.kind);
  c.stub_path = ResolvePath(base_dir, j.value("stub_path", c.stub_path));
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  c.initial_backoff_ms = j.value("initial_backoff_ms", c.initial_backoff_ms);
  c.use_n_field = j.value("use_n_field", c.use_n_field);
  return c;
}

}  // namespace plum
