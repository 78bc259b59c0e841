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

#include "plum/util/process.h"

#include <errno.h>
#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <map>
#include <thread>

extern char** environ;

namespace plum {
namespace {

std::vector<std::string> BuildEnvironment(const ProcessSpec& spec) {
  if (!spec.inherit_env) return spec.env;
  std::map<std::string, std::string> merged;
  for (char** e = environ; *e; ++e) {
    std::string entry(*e);
    size_t eq = entry.find('=');
    merged[entry.substr(0, eq)] = entry;
  }
  for (const auto& entry : spec.env) {
    merged[entry.substr(0, entry.find('='))] = entry;
  }
  std::vector<std::string> out;
  for (auto& [key, entry] : merged) out.push_back(entry);
  return out;
}

std::vector<char*> CStrings(std::vector<std::string>& strings) {
  std::vector<char*> out;
  for (auto& s : strings) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

[[noreturn]] void ChildFail(int fd) {
  int err = errno;
  ssize_t ignored = write(fd, &err, sizeof(err));
  (void)ignored;
  _exit(127);
}

}  // namespace

std::string FindExecutable(const std::string& name) {
  if (name.find('/') != std::string::npos) return name;
  const char* path = std::getenv("PATH");
  if (!path) return name;
  std::string dirs(path);
  size_t start = 0;
  while (start <= dirs.size()) {
    size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    std::string dir = dirs.substr(start, end - start);
    if (dir.empty()) dir = ".";
    std::string candidate = dir + "/" + name;
    if (access(candidate.c_str(), X_OK) == 0) return candidate;
    start = end + 1;
  }
  return name;
}

ProcessResult RunProcess(const ProcessSpec& spec) {
  ProcessResult result;
  if (spec.argv.empty()) {
    result.exec_errno = EINVAL;
    return result;
  }
  // Everything the child touches is prepared before fork.
  std::vector<std::string> argv = spec.argv;
  argv[0] = FindExecutable(argv[0]);
  std::vector<std::string> env = BuildEnvironment(spec);
  std::vector<char*> c_argv = CStrings(argv);
  std::vector<char*> c_env = CStrings(env);
  std::string out_path = spec.stdout_path.empty() ? "/dev/null" : spec.stdout_path;
  std::string err_path = spec.stderr_path.empty() ? "/dev/null" : spec.stderr_path;
  bool shared = out_path == err_path;

  int errpipe[2];
  if (pipe2(errpipe, O_CLOEXEC) != 0) {
    result.exec_errno = errno;
    return result;
  }

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    result.exec_errno = errno;
    close(errpipe[0]);
    close(errpipe[1]);
    return result;
  }
  if (pid == 0) {
    close(errpipe[0]);
    setpgid(0, 0);
    if (!spec.cwd.empty() && chdir(spec.cwd.c_str()) != 0) ChildFail(errpipe[1]);
    int in = open("/dev/null", O_RDONLY | O_CLOEXEC);
    if (in < 0 || dup2(in, 0) < 0) ChildFail(errpipe[1]);
    int out = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (out < 0 || dup2(out, 1) < 0) ChildFail(errpipe[1]);
    int err = shared ? out : open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (err < 0 || dup2(err, 2) < 0) ChildFail(errpipe[1]);
    struct rlimit core = {0, 0};
    setrlimit(RLIMIT_CORE, &core);
    if (spec.memory_limit_bytes > 0) {
      struct rlimit as = {spec.memory_limit_bytes, spec.memory_limit_bytes};
      if (setrlimit(RLIMIT_AS, &as) != 0) ChildFail(errpipe[1]);
    }
    if (spec.cpu_limit_seconds > 0) {
      rlim_t soft = static_cast<rlim_t>(spec.cpu_limit_seconds);
      struct rlimit cpu = {soft, soft + 1};
      setrlimit(RLIMIT_CPU, &cpu);
    }
    if (spec.file_size_limit_bytes > 0) {
      struct rlimit fsize = {spec.file_size_limit_bytes, spec.file_size_limit_bytes};
      setrlimit(RLIMIT_FSIZE, &fsize);
    }
    sigset_t none;
    sigemptyset(&none);
    sigprocmask(SIG_SETMASK, &none, nullptr);
    execve(c_argv[0], c_argv.data(), c_env.data());
    ChildFail(errpipe[1]);
  }
  setpgid(pid, pid);
  close(errpipe[1]);
  int child_errno = 0;
  ssize_t n;
  do {
    n = read(errpipe[0], &child_errno, sizeof(child_errno));
  } while (n < 0 && errno == EINTR);
  close(errpipe[0]);

  int status = 0;
  bool killed = false;
  if (n == sizeof(child_errno)) {
    waitpid(pid, &status, 0);
    result.kind = ProcessResult::Kind::kExecFailed;
    result.exec_errno = child_errno;
    result.duration_seconds = 0;
    return result;
  }
  auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(spec.timeout_seconds));
  auto pause = std::chrono::microseconds(500);
  while (true) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    auto now = std::chrono::steady_clock::now();
    if (spec.timeout_seconds > 0 && now >= deadline && !killed) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      killed = true;
      waitpid(pid, &status, 0);
      break;
    }
    std::this_thread::sleep_for(pause);
    if (pause < std::chrono::milliseconds(5)) pause *= 2;
  }
  auto end = std::chrono::steady_clock::now();
  kill(-pid, SIGKILL);
  result.duration_seconds = std::chrono::duration<double>(end - start).count();
  if (killed) {
    result.kind = ProcessResult::Kind::kTimedOut;
  } else if (WIFEXITED(status)) {
    result.kind = ProcessResult::Kind::kExited;
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.kind = ProcessResult::Kind::kSignaled;
    result.signal = WTERMSIG(status);
  }
  return result;
}

std::string DescribeResult(const ProcessResult& result) {
  switch (result.kind) {
    case ProcessResult::Kind::kExited:
      return "exit " + std::to_string(result.exit_code);
    case ProcessResult::Kind::kSignaled:
      return std::string("signal ") + strsignal(result.signal);
    case ProcessResult::Kind::kTimedOut:
      return "timeout";
    case ProcessResult::Kind::kExecFailed:
      return std::string("exec failed: ") + std::strerror(result.exec_errno);
  }
  return "unknown";
}

}  // namespace plum
