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

#ifndef PLUM_UTIL_PROCESS_H_
#define PLUM_UTIL_PROCESS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace plum {

struct ProcessSpec {
  std::vector<std::string> argv;  // argv[0] is looked up on PATH if bare
  // "KEY=VALUE" entries. With inherit_env they override the parent's
  // environment; otherwise they are the whole environment.
  std::vector<std::string> env;
  bool inherit_env = false;
  std::string cwd;
  // Empty means /dev/null. Equal paths share one descriptor.
  std::string stdout_path;
  std::string stderr_path;
  double timeout_seconds = 0;  // 0 = no wall-clock limit
  uint64_t memory_limit_bytes = 0;
  int cpu_limit_seconds = 0;
  uint64_t file_size_limit_bytes = 0;
};

struct ProcessResult {
  enum class Kind { kExited, kSignaled, kTimedOut, kExecFailed };
  Kind kind = Kind::kExecFailed;
  int exit_code = -1;
  int signal = 0;      // terminating signal when kSignaled
  int exec_errno = 0;  // when kExecFailed
  double duration_seconds = 0;
};

// Runs the child in its own process group with stdin on /dev/null. On
// timeout the whole group is killed; the group is also killed after a
// normal exit so stray grandchildren do not outlive the job.
ProcessResult RunProcess(const ProcessSpec& spec);

// Looks up `name` on PATH; returns it unchanged if it contains a slash or
// is not found.
std::string FindExecutable(const std::string& name);

std::string DescribeResult(const ProcessResult& result);

}  // namespace plum

#endif  // PLUM_UTIL_PROCESS_H_
