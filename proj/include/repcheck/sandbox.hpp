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

#pragma once

// Runs generated code in a separate harness process with a fresh working
// directory, a wall-clock deadline and an output cap. Generated code is never
// loaded into this process.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "repcheck/code_loop.hpp"
#include "repcheck/results.hpp"

namespace repcheck {

struct ExecutionLimits {
  std::chrono::milliseconds wall_clock{std::chrono::seconds(300)};
  std::size_t max_output_bytes = 10u << 20;
  // SIGTERM is escalated to SIGKILL after this long.
  std::chrono::milliseconds term_grace{2000};
};

enum class ErrorPhase { kSpawn, kRuntime, kTimeout, kOutputParse };

std::string_view phase_name(ErrorPhase phase);
std::optional<ErrorPhase> phase_from_name(std::string_view name);

struct ErrorContext {
  std::vector<std::string> columns;
  std::optional<std::pair<long, long>> shape;  // rows, cols

  bool operator==(const ErrorContext&) const = default;
};

struct ErrorReport {
  ErrorPhase phase = ErrorPhase::kRuntime;
  std::string exception_type;
  std::string message;
  std::string stack_trace;
  std::optional<ErrorContext> context;
  std::string raw_stderr;

  bool operator==(const ErrorReport&) const = default;

  // Text fed back to the model in the next prompt.
  std::string render() const;
};

std::string error_report_to_json(const ErrorReport& report);
ErrorReport error_report_from_json(std::string_view text);

/// Parses the harness error document {exception_type, message, traceback,
/// context:{columns, shape}}. Returns nullopt when it is not one.
std::optional<ErrorReport> parse_harness_error(std::string_view text);

struct ExecutionOutcome {
  std::optional<CanonicalResult> result;
  std::optional<ErrorReport> error;
  double duration_seconds = 0.0;
  std::vector<std::filesystem::path> figure_files;
};

/// Launches `harness... <code_path> <data_path> <output_path>` in `workdir`
/// (created if absent, must be empty). Throws Error(kSpawnFailure) when the
/// harness cannot be started and Error(kCancelled) when `stop` fires; the
/// worker's process group is killed in both the timeout and cancel paths.
ExecutionOutcome execute(const SourceArtifact& source, const std::filesystem::path& dataset_path,
                         const ExecutionLimits& limits, const std::filesystem::path& workdir,
                         const std::vector<std::string>& harness, std::stop_token stop = {});

}  // namespace repcheck
