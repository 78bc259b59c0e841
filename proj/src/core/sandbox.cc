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

#include "plum/sandbox.h"

#include <stdlib.h>
#include <unistd.h>

#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "plum/py/parser.h"
#include "plum/util/parallel.h"
#include "plum/util/process.h"

#ifndef PLUM_SOURCE_SHIM
#define PLUM_SOURCE_SHIM ""
#endif

namespace plum {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kStatusNames[] = {
    "Pass",    "TestFailure",      "RuntimeError", "LoadFailure",
    "Timeout", "ResourceExceeded", "SandboxError", "Skipped"};

class TempDir {
 public:
  explicit TempDir(const std::string& root) {
    std::string pattern = (root.empty() ? DefaultRoot() : root) + "/plum-XXXXXX";
    if (mkdtemp(pattern.data()) != nullptr) path_ = pattern;
  }
  ~TempDir() {
    if (!path_.empty()) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  bool ok() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

 private:
  static std::string DefaultRoot() {
    const char* tmp = std::getenv("TMPDIR");
    return tmp && *tmp ? tmp : "/tmp";
  }
  std::string path_;
};

std::string Tail(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) return "";
  std::streamoff size = in.tellg();
  std::streamoff start = size > static_cast<std::streamoff>(kTailBytes)
                             ? size - static_cast<std::streamoff>(kTailBytes)
                             : 0;
  in.seekg(start);
  std::string out(static_cast<size_t>(size - start), '\0');
  in.read(out.data(), static_cast<std::streamsize>(out.size()));
  return out;
}

struct Marker {
  std::string status;
  std::string summary;
};

std::optional<Marker> LastMarker(const std::string& err) {
  size_t end = err.find_last_not_of("\r\n");
  if (end == std::string::npos) return std::nullopt;
  size_t start = err.rfind('\n', end);
  start = start == std::string::npos ? 0 : start + 1;
  std::string line = err.substr(start, end + 1 - start);
  if (line.rfind("PLUM:", 0) != 0) return std::nullopt;
  size_t colon = line.find(':', 5);
  if (colon == std::string::npos) return std::nullopt;
  return Marker{line.substr(5, colon - 5), line.substr(colon + 1)};
}

ExecutionOutcome Infrastructure(std::string detail) {
  ExecutionOutcome o;
  o.status = ExecStatus::kSandboxError;
  o.exit_detail = std::move(detail);
  return o;
}

ExecStatus Classify(const ProcessResult& r, const std::optional<Marker>& marker) {
  using Kind = ProcessResult::Kind;
  switch (r.kind) {
    case Kind::kTimedOut:
      return ExecStatus::kTimeout;
    case Kind::kExecFailed:
      return ExecStatus::kSandboxError;
    case Kind::kSignaled:
      if (r.signal == SIGXCPU || r.signal == SIGXFSZ || r.signal == SIGKILL) {
        return ExecStatus::kResourceExceeded;
      }
      return ExecStatus::kRuntimeError;
    case Kind::kExited:
      break;
  }
  switch (r.exit_code) {
    case 0:
      return marker && marker->status == "PASS" ? ExecStatus::kPass
                                                : ExecStatus::kRuntimeError;
    case 10:
      return ExecStatus::kTestFailure;
    case 11:
      return marker && marker->summary == "MemoryError"
                 ? ExecStatus::kResourceExceeded
                 : ExecStatus::kRuntimeError;
    case 12:
      return ExecStatus::kLoadFailure;
    case 120:
    case 126:
    case 127:
      return ExecStatus::kSandboxError;
    default:
      return ExecStatus::kRuntimeError;
  }
}

}  // namespace

std::string_view StatusName(ExecStatus status) {
  return kStatusNames[static_cast<int>(status)];
}

ExecStatus StatusFromName(std::string_view name) {
  for (size_t i = 0; i < std::size(kStatusNames); ++i) {
    if (kStatusNames[i] == name) return static_cast<ExecStatus>(i);
  }
  throw std::invalid_argument("unknown execution status: " + std::string(name));
}

StaticCheckResult StaticCheck(std::string_view code) {
  StaticCheckResult result;
  try {
    py::Parse(code);
  } catch (const py::SyntaxError& e) {
    result.ok = false;
    result.line = e.loc().line;
    result.diagnostic = "line " + std::to_string(e.loc().line) + ": " + e.message();
  }
  return result;
}

std::string AssembleProgram(std::string_view candidate, std::string_view test) {
  std::string out(candidate);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += '\n';
  out += test;
  return out;
}

std::string DefaultShimPath() {
  const char* env = std::getenv("PLUM_SHIM");
  if (env && *env) return env;
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    for (fs::path candidate : {self.parent_path() / "plum_shim.py",
                               self.parent_path() / "../share/plum/plum_shim.py"}) {
      if (fs::exists(candidate, ec)) return fs::weakly_canonical(candidate, ec).string();
    }
  }
  std::string source = PLUM_SOURCE_SHIM;
  if (!source.empty() && fs::exists(source, ec)) return source;
  return "";
}

Sandbox::Sandbox(SandboxConfig config) : config_(std::move(config)) {
  if (config_.time_limit_seconds <= 0) {
    throw std::invalid_argument("sandbox time limit must be > 0");
  }
  if (config_.memory_limit_bytes == 0) {
    throw std::invalid_argument("sandbox memory limit must be > 0");
  }
  if (config_.parallelism < 1) {
    throw std::invalid_argument("sandbox parallelism must be >= 1");
  }
  if (config_.shim_path.empty()) config_.shim_path = DefaultShimPath();
}

std::optional<std::string> Sandbox::InfrastructureProblem() const {
  if (config_.shim_path.empty() || access(config_.shim_path.c_str(), R_OK) != 0) {
    return "shim not readable: " + config_.shim_path;
  }
  std::string interpreter = FindExecutable(config_.interpreter);
  if (access(interpreter.c_str(), X_OK) != 0) {
    return "interpreter not executable: " + config_.interpreter;
  }
  return std::nullopt;
}

StaticCheckResult Sandbox::Check(std::string_view code) const {
  StaticCheckResult result = StaticCheck(code);
  if (!result.ok || config_.analyzer.empty()) return result;
  TempDir dir(config_.temp_root);
  if (!dir.ok()) throw std::runtime_error("cannot create temp dir for analyzer");
  std::string file = dir.path() + "/candidate.py";
  WriteFileAtomic(file, std::string(code));
  ProcessSpec spec;
  spec.argv = config_.analyzer;
  spec.argv.push_back(file);
  spec.inherit_env = true;
  spec.cwd = dir.path();
  spec.stdout_path = dir.path() + "/analyzer.out";
  spec.stderr_path = spec.stdout_path;
  spec.timeout_seconds = std::max(30.0, config_.time_limit_seconds);
  ProcessResult r = RunProcess(spec);
  if (r.kind == ProcessResult::Kind::kExecFailed) {
    throw std::runtime_error("analyzer failed to start: " + DescribeResult(r));
  }
  if (r.kind != ProcessResult::Kind::kExited || r.exit_code != 0) {
    result.ok = false;
    std::string out = Tail(spec.stdout_path);
    size_t end = out.find_last_not_of(" \r\n");
    result.diagnostic = "analyzer " + DescribeResult(r) + ": " +
                        (end == std::string::npos ? "" : out.substr(0, end + 1));
  }
  return result;
}

ExecutionRequest Sandbox::MakeRequest(std::string program, bool smoke) const {
  ExecutionRequest r;
  r.program_source = std::move(program);
  r.time_limit_seconds = config_.time_limit_seconds;
  r.memory_limit_bytes = config_.memory_limit_bytes;
  r.smoke = smoke;
  return r;
}

ExecutionOutcome Sandbox::Execute(const ExecutionRequest& request) const {
  if (request.time_limit_seconds <= 0 || request.memory_limit_bytes == 0) {
    return Infrastructure("invalid request limits");
  }
  if (auto problem = InfrastructureProblem()) return Infrastructure(*problem);
  TempDir dir(config_.temp_root);
  if (!dir.ok()) return Infrastructure("cannot create temp dir");
  std::string program = dir.path() + "/program.py";
  try {
    WriteFileAtomic(program, request.program_source);
  } catch (const std::exception& e) {
    return Infrastructure(e.what());
  }
  ProcessSpec spec;
  spec.argv.push_back(config_.interpreter);
  spec.argv.insert(spec.argv.end(), config_.interpreter_args.begin(),
                   config_.interpreter_args.end());
  spec.argv.push_back(config_.shim_path);
  if (request.smoke) spec.argv.push_back("--smoke");
  spec.argv.push_back(program);
  const char* path = std::getenv("PATH");
  spec.env = {
      "PATH=" + std::string(path ? path : "/usr/local/bin:/usr/bin:/bin"),
      "HOME=" + dir.path(),
      "TMPDIR=" + dir.path(),
      "LANG=C.UTF-8",
      "PYTHONHASHSEED=0",
      "PYTHONDONTWRITEBYTECODE=1",
      "PYTHONIOENCODING=utf-8",
  };
  if (config_.no_network) spec.env.push_back("PLUM_NO_NETWORK=1");
  spec.cwd = dir.path();
  spec.stdout_path = dir.path() + "/stdout";
  spec.stderr_path = dir.path() + "/stderr";
  spec.timeout_seconds = request.time_limit_seconds;
  spec.memory_limit_bytes = request.memory_limit_bytes;
  spec.cpu_limit_seconds = static_cast<int>(std::ceil(request.time_limit_seconds)) + 1;
  spec.file_size_limit_bytes = config_.output_limit_bytes;
  ProcessResult r = RunProcess(spec);

  ExecutionOutcome outcome;
  outcome.duration_seconds = r.duration_seconds;
  outcome.stdout_tail = Tail(spec.stdout_path);
  outcome.stderr_tail = Tail(spec.stderr_path);
  std::optional<Marker> marker = LastMarker(outcome.stderr_tail);
  outcome.status = Classify(r, marker);
  outcome.exit_detail = DescribeResult(r);
  if (marker) outcome.exit_detail += "; " + marker->status + ":" + marker->summary;
  return outcome;
}

std::vector<ExecutionOutcome> Sandbox::ExecuteAll(
    const std::vector<ExecutionRequest>& requests) const {
  std::vector<ExecutionOutcome> out(requests.size());
  ParallelFor(requests.size(), config_.parallelism,
              [&](size_t i) { out[i] = Execute(requests[i]); });
  return out;
}

OutcomeMap Sandbox::RunMatrix(const std::vector<MatrixJob>& jobs) const {
  // Work units: one per job, or one chain per candidate in short-circuit mode.
  std::vector<std::vector<size_t>> units;
  if (config_.short_circuit) {
    std::map<std::string, size_t> unit_of;
    for (size_t i = 0; i < jobs.size(); ++i) {
      auto [it, inserted] = unit_of.emplace(jobs[i].candidate_key, units.size());
      if (inserted) units.emplace_back();
      units[it->second].push_back(i);
    }
  } else {
    for (size_t i = 0; i < jobs.size(); ++i) units.push_back({i});
  }
  std::vector<ExecutionOutcome> results(jobs.size());
  ParallelFor(units.size(), config_.parallelism, [&](size_t u) {
    bool failed = false;
    for (size_t i : units[u]) {
      if (failed) {
        results[i].status = ExecStatus::kSkipped;
        results[i].exit_detail = "skipped after earlier failure";
        continue;
      }
      results[i] = Execute(jobs[i].request);
      failed = results[i].status != ExecStatus::kPass;
    }
  });
  OutcomeMap out;
  for (size_t i = 0; i < jobs.size(); ++i) {
    auto key = std::make_pair(jobs[i].candidate_key, jobs[i].test_key);
    if (!out.emplace(key, std::move(results[i])).second) {
      throw std::invalid_argument("duplicate matrix job " + key.first + "/" + key.second);
    }
  }
  return out;
}

Json ToJson(const ExecutionOutcome& outcome) {
  Json j;
  j["status"] = std::string(StatusName(outcome.status));
  j["exit_detail"] = outcome.exit_detail;
  return j;
}

ExecutionOutcome OutcomeFromJson(const Json& j) {
  ExecutionOutcome o;
  o.status = StatusFromName(j.at("status").get<std::string>());
  o.exit_detail = j.value("exit_detail", "");
  return o;
}

SandboxConfig SandboxConfigFromJson(const Json& j, const std::string& base_dir) {
  SandboxConfig c;
  c.interpreter = j.value("interpreter", c.interpreter);
  if (c.interpreter.find('/') != std::string::npos) {
    c.interpreter = ResolvePath(base_dir, c.interpreter);
  }
  c.interpreter_args = j.value("interpreter_args", c.interpreter_args);
  if (j.contains("shim_path")) c.shim_path = ResolvePath(base_dir, j["shim_path"]);
  c.time_limit_seconds = j.value("time_limit_seconds", c.time_limit_seconds);
  if (j.contains("memory_limit_mib")) {
    c.memory_limit_bytes = j["memory_limit_mib"].get<uint64_t>() << 20;
  }
  if (j.contains("output_limit_mib")) {
    c.output_limit_bytes = j["output_limit_mib"].get<uint64_t>() << 20;
  }
  c.parallelism = j.value("parallelism", c.parallelism);
  c.short_circuit = j.value("short_circuit", c.short_circuit);
  c.no_network = j.value("no_network", c.no_network);
  c.analyzer = j.value("analyzer", c.analyzer);
  if (j.contains("temp_root")) c.temp_root = ResolvePath(base_dir, j["temp_root"]);
  if (c.time_limit_seconds <= 0) throw std::invalid_argument("sandbox.time_limit_seconds must be > 0");
  if (c.memory_limit_bytes == 0) throw std::invalid_argument("sandbox.memory_limit_mib must be > 0");
  if (c.parallelism < 1) throw std::invalid_argument("sandbox.parallelism must be >= 1");
  return c;
}

}  // namespace plum
