// Copyright 2026 The repcheck Authors. All rights reserved.
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

#include "repcheck/sandbox.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "repcheck/util.hpp"

extern char** environ;

namespace repcheck {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kStderrKeep = 64 * 1024;
constexpr auto kPollInterval = std::chrono::milliseconds(20);

std::string tail(const std::string& text, std::size_t limit) {
  if (text.size() <= limit) return text;
  return "...[truncated]\n" + text.substr(text.size() - limit);
}

std::string read_capped(const fs::path& path, std::size_t limit) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  return tail(read_file(path), limit);
}

std::uintmax_t size_or_zero(const fs::path& path) {
  std::error_code ec;
  auto n = fs::file_size(path, ec);
  return ec ? 0 : n;
}

std::string last_nonempty_line(const std::string& text) {
  auto lines = split_lines(text);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (!trim(*it).empty()) return std::string(trim(*it));
  }
  return {};
}

class Worker {
 public:
  Worker(const std::vector<std::string>& argv, const fs::path& workdir, const fs::path& out,
         const fs::path& err) {
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addchdir_np(&actions, workdir.c_str());
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    int rc = posix_spawnp(&pid_, args[0], &actions, &attr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) {
      throw Error(ErrorCode::kSpawnFailure,
                  "cannot start harness '" + argv[0] + "': " + std::strerror(rc));
    }
  }

  Worker(const Worker&) = delete;
  Worker& operator=(const Worker&) = delete;

  ~Worker() {
    if (!reaped_) {
      kill_group(SIGKILL);
      wait_blocking();
    }
  }

  // True once the worker has exited.
  bool poll() {
    if (reaped_) return true;
    int status = 0;
    pid_t r = waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      record(status);
      return true;
    }
    return false;
  }

  void kill_group(int sig) { ::kill(-pid_, sig); }

  // SIGTERM, then SIGKILL once the grace period runs out.
  void terminate(std::chrono::milliseconds grace) {
    kill_group(SIGTERM);
    auto until = Clock::now() + grace;
    while (!poll() && Clock::now() < until) std::this_thread::sleep_for(kPollInterval);
    kill_group(SIGKILL);
    wait_blocking();
  }

  int exit_code() const { return exit_code_; }
  int signal() const { return signal_; }

 private:
  void wait_blocking() {
    if (reaped_) return;
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    record(status);
  }

  void record(int status) {
    reaped_ = true;
    if (WIFEXITED(status)) exit_code_ = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) signal_ = WTERMSIG(status);
    // Reap stray grandchildren left in the group.
    ::kill(-pid_, SIGKILL);
  }

  pid_t pid_ = -1;
  bool reaped_ = false;
  int exit_code_ = -1;
  int signal_ = 0;
};

std::vector<fs::path> figure_files_in(const fs::path& workdir) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& entry : fs::recursive_directory_iterator(workdir, ec)) {
    if (!entry.is_regular_file()) continue;
    auto ext = to_lower(entry.path().extension().string());
    if (ext == ".png" || ext == ".svg" || ext == ".pdf" || ext == ".jpg" || ext == ".jpeg") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view phase_name(ErrorPhase phase) {
  switch (phase) {
    case ErrorPhase::kSpawn: return "spawn";
    case ErrorPhase::kRuntime: return "runtime";
    case ErrorPhase::kTimeout: return "timeout";
    case ErrorPhase::kOutputParse: return "output-parse";
  }
  return "runtime";
}

std::optional<ErrorPhase> phase_from_name(std::string_view name) {
  for (auto p : {ErrorPhase::kSpawn, ErrorPhase::kRuntime, ErrorPhase::kTimeout,
                 ErrorPhase::kOutputParse}) {
    if (phase_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string ErrorReport::render() const {
  std::string out = "Phase: " + std::string(phase_name(phase)) + "\n";
  out += "Exception: " + exception_type + ": " + message + "\n";
  if (!stack_trace.empty()) {
    out += "\nTraceback:\n" + stack_trace;
    if (stack_trace.back() != '\n') out += '\n';
  }
  if (context) {
    if (!context->columns.empty()) {
      out += "\nColumns present:";
      for (const auto& c : context->columns) out += " " + c;
      out += '\n';
    }
    if (context->shape) {
      out += "Data dimensions: " + std::to_string(context->shape->first) + " rows x " +
             std::to_string(context->shape->second) + " columns\n";
    }
  }
  if (stack_trace.empty() && !raw_stderr.empty()) {
    out += "\nStandard error:\n" + tail(raw_stderr, 4000);
    if (out.back() != '\n') out += '\n';
  }
  return out;
}

std::string error_report_to_json(const ErrorReport& r) {
  json j;
  j["phase"] = phase_name(r.phase);
  j["exception_type"] = r.exception_type;
  j["message"] = r.message;
  j["stack_trace"] = r.stack_trace;
  if (r.context) {
    json ctx;
    ctx["columns"] = r.context->columns;
    if (r.context->shape) ctx["shape"] = {r.context->shape->first, r.context->shape->second};
    j["context"] = std::move(ctx);
  }
  j["raw_stderr"] = r.raw_stderr;
  return j.dump(2) + "\n";
}

namespace {

std::optional<ErrorContext> context_from(const json& j) {
  if (!j.is_object()) return std::nullopt;
  ErrorContext ctx;
  if (auto c = j.find("columns"); c != j.end() && c->is_array()) {
    for (const auto& col : *c) {
      if (col.is_string()) ctx.columns.push_back(col.get<std::string>());
    }
  }
  if (auto s = j.find("shape"); s != j.end() && s->is_array() && s->size() == 2 &&
                                 (*s)[0].is_number_integer() && (*s)[1].is_number_integer()) {
    ctx.shape = std::make_pair((*s)[0].get<long>(), (*s)[1].get<long>());
  }
  return ctx;
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

ErrorReport error_report_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_object()) throw Error(ErrorCode::kCorruptLedger, "error.json is not a JSON object");
  ErrorReport r;
  auto phase = phase_from_name(string_field(j, "phase"));
  if (!phase) throw Error(ErrorCode::kCorruptLedger, "error.json has an unknown phase");
  r.phase = *phase;
  r.exception_type = string_field(j, "exception_type");
  r.message = string_field(j, "message");
  r.stack_trace = string_field(j, "stack_trace");
  if (auto c = j.find("context"); c != j.end()) r.context = context_from(*c);
  r.raw_stderr = string_field(j, "raw_stderr");
  return r;
}

std::optional<ErrorReport> parse_harness_error(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_object() || !j.contains("exception_type") || !j["exception_type"].is_string()) {
    return std::nullopt;
  }
  ErrorReport r;
  r.phase = ErrorPhase::kRuntime;
  r.exception_type = j["exception_type"].get<std::string>();
  r.message = string_field(j, "message");
  r.stack_trace = string_field(j, "traceback");
  if (auto c = j.find("context"); c != j.end()) r.context = context_from(*c);
  if (r.message.empty()) r.message = r.exception_type;
  return r;
}

ExecutionOutcome execute(const SourceArtifact& source, const fs::path& dataset_path,
                         const ExecutionLimits& limits, const fs::path& workdir_in,
                         const std::vector<std::string>& harness, std::stop_token stop) {
  require(!harness.empty(), "harness command is empty");
  require(limits.wall_clock.count() > 0 && limits.max_output_bytes > 0,
          "execution limits must be positive");
  const fs::path workdir = fs::absolute(workdir_in);
  fs::create_directories(workdir);
  require(fs::is_empty(workdir), "sandbox workdir must be empty");

  const fs::path code_path = workdir / "code.src";
  const fs::path output_path = workdir / "output.json";
  const fs::path stdout_path = workdir / "stdout.txt";
  const fs::path stderr_path = workdir / "stderr.txt";
  write_file(code_path, source.code_text);

  std::vector<std::string> argv = harness;
  argv.push_back(code_path.string());
  argv.push_back(fs::absolute(dataset_path).string());
  argv.push_back(output_path.string());

  ExecutionOutcome outcome;
  const auto started = Clock::now();
  const auto deadline = started + limits.wall_clock;
  auto fail = [&](ErrorPhase phase, std::string type, std::string message) {
    ErrorReport r;
    r.phase = phase;
    r.exception_type = std::move(type);
    r.message = std::move(message);
    r.raw_stderr = read_capped(stderr_path, std::min(limits.max_output_bytes, kStderrKeep));
    outcome.error = std::move(r);
  };

  {
    Worker worker(argv, workdir, stdout_path, stderr_path);
    bool timed_out = false;
    bool over_limit = false;
    while (!worker.poll()) {
      if (stop.stop_requested()) {
        worker.terminate(limits.term_grace);
        throw Error(ErrorCode::kCancelled, "execution cancelled");
      }
      if (Clock::now() >= deadline) {
        timed_out = true;
        worker.terminate(limits.term_grace);
        break;
      }
      if (size_or_zero(stdout_path) + size_or_zero(stderr_path) + size_or_zero(output_path) >
          limits.max_output_bytes) {
        over_limit = true;
        worker.terminate(limits.term_grace);
        break;
      }
      std::this_thread::sleep_for(kPollInterval);
    }
    outcome.duration_seconds = std::chrono::duration<double>(Clock::now() - started).count();

    if (timed_out) {
      fail(ErrorPhase::kTimeout, "Timeout",
           "execution exceeded the wall-clock limit of " +
               format_number(std::chrono::duration<double>(limits.wall_clock).count(), 1) +
               " s and was terminated");
    } else if (over_limit) {
      fail(ErrorPhase::kOutputParse, "OutputLimitExceeded",
           "worker output exceeded " + std::to_string(limits.max_output_bytes) + " bytes");
    } else if (worker.signal() != 0) {
      fail(ErrorPhase::kRuntime, "Signal",
           std::string("worker killed by signal ") + strsignal(worker.signal()));
    } else if (worker.exit_code() == 0) {
      if (!fs::exists(output_path)) {
        fail(ErrorPhase::kOutputParse, "MissingOutput", "harness exited 0 without an output document");
      } else if (size_or_zero(output_path) > limits.max_output_bytes) {
        fail(ErrorPhase::kOutputParse, "OutputLimitExceeded", "output document exceeds the size cap");
      } else {
        try {
          outcome.result = parse_result(read_file(output_path));
        } catch (const Error& e) {
          fail(ErrorPhase::kOutputParse, std::string(error_code_name(e.code())), e.detail());
        }
      }
    } else {
      std::optional<ErrorReport> doc;
      if (worker.exit_code() == 1 && fs::exists(output_path) &&
          size_or_zero(output_path) <= limits.max_output_bytes) {
        doc = parse_harness_error(read_file(output_path));
      }
      if (doc) {
        doc->raw_stderr = read_capped(stderr_path, std::min(limits.max_output_bytes, kStderrKeep));
        outcome.error = std::move(doc);
      } else {
        fail(ErrorPhase::kRuntime, "ProcessExit",
             "harness exited with status " + std::to_string(worker.exit_code()));
        auto last = last_nonempty_line(outcome.error->raw_stderr);
        if (!last.empty()) outcome.error->message += ": " + last;
        outcome.error->stack_trace = outcome.error->raw_stderr;
      }
    }
  }
  outcome.figure_files = figure_files_in(workdir);
  return outcome;
}

}  // namespace repcheck
