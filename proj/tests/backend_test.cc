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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "plum/backend.h"
#include "support/fixtures.h"

namespace plum {
namespace {

using testing::ScratchDir;

class FakeServer {
 public:
  FakeServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

Json Reply(const std::vector<std::string>& texts) {
  Json choices = Json::array();
  for (const auto& t : texts) choices.push_back({{"message", {{"role", "assistant"}, {"content", t}}}});
  return {{"choices", choices}};
}

BackendConfig HttpConfig(const std::string& endpoint) {
  BackendConfig c;
  c.kind = "http";
  c.endpoint = endpoint;
  c.model = "m";
  c.timeout_seconds = 5;
  c.max_attempts = 3;
  c.initial_backoff_ms = 1;
  return c;
}

TEST(StubBackendTest, ReturnsPrefixAndMissesUnknownIds) {
  ScratchDir dir;
  WriteFileAtomic(dir / "s.jsonl", "{\"instruction_id\":\"a\",\"completions\":[\"x\",\"y\",\"z\"]}\n");
  StubBackend stub(dir / "s.jsonl", "completions");
  CompletionRequest req;
  req.instruction_id = "a";
  req.count = 2;
  EXPECT_EQ(stub.Complete(req), (std::vector<std::string>{"x", "y"}));
  req.count = 10;
  EXPECT_EQ(stub.Complete(req).size(), 3u);
  req.instruction_id = "b";
  EXPECT_THROW(stub.Complete(req), StubMiss);
  EXPECT_THROW(StubBackend(dir / "s.jsonl", "responses"), BackendUnavailable);
  EXPECT_THROW(StubBackend(dir / "missing.jsonl", "responses"), BackendUnavailable);
}

TEST(HttpBackendTest, SendsChatRequestWithBearerToken) {
  FakeServer fake;
  Json seen;
  std::string auth;
  fake.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(Reply({"hello"}).dump(), "application/json");
  });
  setenv("PLUM_TEST_KEY", "secret", 1);
  BackendConfig c = HttpConfig(fake.url("/v1/chat/completions"));
  c.api_key_env = "PLUM_TEST_KEY";
  HttpBackend backend(c);
  CompletionRequest req;
  req.prompt = "p";
  req.temperature = 0.5;
  req.max_tokens = 10;
  req.count = 2;
  EXPECT_EQ(backend.Complete(req), (std::vector<std::string>{"hello", "hello"}));
  EXPECT_EQ(seen["model"], "m");
  EXPECT_EQ(seen["messages"][0]["content"], "p");
  EXPECT_EQ(seen["temperature"], 0.5);
  EXPECT_EQ(seen["max_tokens"], 10);
  EXPECT_FALSE(seen.contains("n"));
  EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpBackendTest, NFieldBatchesCompletions) {
  FakeServer fake;
  fake.server().Post("/c", [&](const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body);
    EXPECT_EQ(body["n"], 3);
    res.set_content(Reply({"a", "b"}).dump(), "application/json");
  });
  BackendConfig c = HttpConfig(fake.url("/c"));
  c.use_n_field = true;
  HttpBackend backend(c);
  CompletionRequest req;
  req.count = 3;
  EXPECT_EQ(backend.Complete(req), (std::vector<std::string>{"a", "b"}));
}

TEST(HttpBackendTest, RetriesServerErrorsThenSucceeds) {
  FakeServer fake;
  std::atomic<int> calls{0};
  fake.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    res.set_content(Reply({"ok"}).dump(), "application/json");
  });
  HttpBackend backend(HttpConfig(fake.url("/c")));
  EXPECT_EQ(backend.Complete({}), (std::vector<std::string>{"ok"}));
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackendTest, GivesUpAfterMaxAttempts) {
  FakeServer fake;
  std::atomic<int> calls{0};
  fake.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  HttpBackend backend(HttpConfig(fake.url("/c")));
  EXPECT_THROW(backend.Complete({}), BackendUnavailable);
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackendTest, ClientErrorIsNotRetried) {
  FakeServer fake;
  std::atomic<int> calls{0};
  fake.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  HttpBackend backend(HttpConfig(fake.url("/c")));
  EXPECT_THROW(backend.Complete({}), BackendUnavailable);
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpBackendTest, MalformedReply) {
  FakeServer fake;
  fake.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"nope\":1}", "application/json");
  });
  HttpBackend backend(HttpConfig(fake.url("/c")));
  EXPECT_THROW(backend.Complete({}), BackendUnavailable);
}

TEST(HttpBackendTest, UnreachableEndpoint) {
  BackendConfig c = HttpConfig("http://127.0.0.1:1/c");
  c.max_attempts = 2;
  HttpBackend backend(c);
  EXPECT_THROW(backend.Complete({}), BackendUnavailable);
  EXPECT_THROW(HttpBackend(HttpConfig("not-a-url")), BackendUnavailable);
}

TEST(BackendConfigTest, FromJsonResolvesStubPath) {
  BackendConfig c = BackendConfigFromJson(Json{{"backend", "stub"}, {"stub_path", "s.jsonl"}}, "/base");
  EXPECT_EQ(c.kind, "stub");
  EXPECT_EQ(c.stub_path, "/base/s.jsonl");
  EXPECT_THROW(MakeBackend(BackendConfigFromJson(Json{{"backend", "grpc"}}, "/"), "x"),
               BackendUnavailable);
}

}  // namespace
}  // namespace plum
