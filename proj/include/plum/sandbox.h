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

#ifndef PLUM_SANDBOX_H_
#define PLUM_SANDBOX_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plum/util/io.h"

namespace plum {

enum class ExecStatus {
  kPass,
  kTestFailure,
  kRuntimeError,
  kLoadFailure,
  kTimeout,
  kResourceExceeded,
  kSandboxError,
  kSkipped,
};

std::string_view StatusName(ExecStatus status);
// Throws std::invalid_argument for an unknown name.
ExecStatus StatusFromName(std::string_view name);

// Raised where an infrastructure failure must not be read as a verdict.
class SandboxFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr size_t kTailBytes = 4096;

struct SandboxConfig {
  std::string interpreter = "python3";
  std::vector<std::string> interpreter_args;
  std::string shim_path;
  double time_limit_seconds = 10.0;
  uint64_t memory_limit_bytes = 512ull << 20;
  uint64_t output_limit_bytes = 16ull << 20;
  int parallelism = 1;
  bool short_circuit = false;
  bool no_network = false;
  // Optional external analyzer; the source file path is appended.
  std::vector<std::string> analyzer;
  std::string temp_root;  // empty: $TMPDIR or /tmp
};

struct ExecutionRequest {
  std::string program_source;
  double time_limit_seconds = 10.0;
  uint64_t memory_limit_bytes = 512ull << 20;
  bool smoke = false;
};

struct ExecutionOutcome {
  ExecStatus status = ExecStatus::kSandboxError;
  double duration_seconds = 0;
  std::string stdout_tail;
  std::string stderr_tail;
  std::string exit_detail;
};

struct StaticCheckResult {
  bool ok = true;
  int line = 0;
  std::string diagnostic;
};

// Grammar check only.
StaticCheckResult StaticCheck(std::string_view code);

std::string AssembleProgram(std::string_view candidate, std::string_view test);

struct MatrixJob {
  std::string candidate_key;
  std::string test_key;
  ExecutionRequest request;
};

using OutcomeMap = std::map<std::pair<std::string, std::string>, ExecutionOutcome>;

class Sandbox {
 public:
  explicit Sandbox(SandboxConfig config);

  const SandboxConfig& config() const { return config_; }

  // Grammar check plus the configured analyzer, if any.
  StaticCheckResult Check(std::string_view code) const;

  ExecutionRequest MakeRequest(std::string program, bool smoke = false) const;

  // Never throws; infrastructure problems become kSandboxError.
  ExecutionOutcome Execute(const ExecutionRequest& request) const;

  // Outcomes in input order.
  std::vector<ExecutionOutcome> ExecuteAll(
      const std::vector<ExecutionRequest>& requests) const;

  // With short_circuit, jobs sharing a candidate_key run in input order on
  // one worker and those after the first non-Pass are marked kSkipped.
  OutcomeMap RunMatrix(const std::vector<MatrixJob>& jobs) const;

 private:
  std::optional<std::string> InfrastructureProblem() const;

  SandboxConfig config_;
};

Json ToJson(const ExecutionOutcome& outcome);
ExecutionOutcome OutcomeFromJson(const Json& j);

SandboxConfig SandboxConfigFromJson(const Json& j, const std::string& base_dir);

// Location of the shim next to the installed binaries or in the source
// tree; empty if neither exists.
std::string DefaultShimPath();

}  // namespace plum

#endif  // PLUM_SANDBOX_H_
