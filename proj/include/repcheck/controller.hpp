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

// The outer loop: Step 1 once, then prompt -> code -> execute -> score until
// the threshold is met or the attempt budget runs out. Every attempt is
// persisted and run.json is rewritten after each one, so a run can be
// resumed from its directory.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "repcheck/code_loop.hpp"
#include "repcheck/evaluator.hpp"
#include "repcheck/ingest.hpp"
#include "repcheck/llm_gateway.hpp"
#include "repcheck/sandbox.hpp"

namespace repcheck {

enum class LlmMode { kLive, kRecord, kReplay };
enum class RunStatus { kRunning, kSuccess, kExhausted, kAborted };

std::string_view llm_mode_name(LlmMode mode);
std::optional<LlmMode> llm_mode_from_name(std::string_view name);
std::string_view run_status_name(RunStatus status);
std::optional<RunStatus> run_status_from_name(std::string_view name);

// Where the inputs live; stored so that resume can reload them.
struct RunInputs {
  std::filesystem::path paper;
  std::filesystem::path codebook;
  std::filesystem::path data;
  std::string target;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> paper_document;

  bool operator==(const RunInputs&) const = default;
};

struct RunConfig {
  int threshold = 95;
  int max_attempts = 100;
  ExecutionLimits limits;
  bool judge_enabled = false;
  LlmMode llm_mode = LlmMode::kLive;
  std::optional<std::filesystem::path> transcript;
  bool strict_replay = false;
  std::vector<std::string> harness{"repcheck-harness"};
  std::map<std::string, std::string> extra_aliases;
  std::filesystem::path out_dir;  // not persisted

  void validate() const;
};

/// Full in-memory view of one loop iteration.
struct Attempt {
  int index = 0;
  std::string prompt_digest;
  std::string reply;
  std::optional<SourceArtifact> source;  // absent when no code was found
  ExecutionOutcome outcome;
  std::optional<AlignmentBreakdown> breakdown;
  std::optional<DiscrepancyReport> report;
  double duration_seconds = 0.0;
};

struct BestTracker {
  std::optional<int> best_index;
  int best_score = -1;
  std::string best_source;
  std::string best_report;

  bool operator==(const BestTracker&) const = default;
};

// Strictly higher scores replace the tracker; errored attempts never do.
BestTracker update_best(BestTracker tracker, const Attempt& attempt);

// Ledger row for one attempt.
struct AttemptRecord {
  int index = 0;
  bool errored = false;
  std::optional<int> score;
  std::optional<ErrorPhase> phase;
  std::string exception_type;
  std::string prompt_digest;
  std::string template_hash;
  double duration_seconds = 0.0;
  std::size_t llm_calls = 0;  // gateway calls consumed once this attempt finished

  bool operator==(const AttemptRecord&) const = default;
};

struct RunCounters {
  int trials = 0;
  int errors = 0;
  int completed = 0;

  bool operator==(const RunCounters&) const = default;
};

struct RunLedger {
  RunConfig config;
  RunInputs inputs;
  RunStatus status = RunStatus::kRunning;
  std::optional<std::string> abort_cause;
  bool step1_done = false;
  std::size_t step1_llm_calls = 0;
  std::string reference_source;  // "user" or "transcribed"
  bool reference_repaired = false;
  std::vector<AttemptRecord> attempts;
  BestTracker best;
  RunCounters counters;
  std::vector<std::string> warnings;
};

std::string ledger_to_json(const RunLedger& ledger);
// Throws Error(kCorruptLedger) for anything that is not a valid ledger.
RunLedger ledger_from_json(std::string_view text);

// Reads out_dir/run.json. Throws Error(kCorruptLedger) when absent or invalid.
RunLedger load_ledger(const std::filesystem::path& out_dir);

struct RunHooks {
  // Called after each attempt has been persisted.
  std::function<void(const RunLedger&, const Attempt&)> after_attempt;
  // Receives gateway and Step-1 warnings as they occur.
  std::function<void(const std::string&)> log;
};

/// Runs Step 1 and the loop. Operational failures (spawn failure, transcript
/// exhausted, unusable reference, provider errors) end the run with status
/// aborted instead of throwing. Cancellation via `stop` leaves status running
/// so the run can be resumed.
RunLedger run(const PaperBundle& bundle, const RunInputs& inputs, const RunConfig& config,
              Gateway& gateway, std::stop_token stop = {}, const RunHooks& hooks = {});

/// Continues a run from its directory under the stored config. Success runs
/// are returned untouched. Throws Error(kCorruptLedger) when the attempt
/// directories disagree with the ledger.
RunLedger resume(const std::filesystem::path& out_dir, Gateway& gateway,
                 std::stop_token stop = {}, const RunHooks& hooks = {});

/// Consolidated markdown report: config, score trajectory, counters and the
/// best attempt's discrepancy report.
std::string render_run_report(const std::filesystem::path& out_dir);

// Compares two run.json documents ignoring durations.
bool ledgers_structurally_equal(std::string_view a, std::string_view b);

}  // namespace repcheck
