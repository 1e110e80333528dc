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

#include "doctest.h"
#include "repcheck/controller.hpp"
#include "scenarios.hpp"

using namespace repcheck;
using namespace repcheck::testing;

namespace {

RunLedger run_scenario(const std::string& name, const fs::path& out, std::stop_token stop = {},
                       const RunHooks& hooks = {}, bool strict = true) {
  const auto& s = scenario(name);
  auto inputs = scenario_inputs(s);
  auto cfg = scenario_config(s, out);
  cfg.strict_replay = strict;
  ReplayGateway gateway(read_transcript(*cfg.transcript), strict);
  return run(scenario_bundle(inputs), inputs, cfg, gateway, stop, hooks);
}

Attempt scored_attempt(int index, int score) {
  Attempt a;
  a.index = index;
  a.source = SourceArtifact{"code " + std::to_string(index), "run_analysis", index};
  a.breakdown = AlignmentBreakdown{};
  a.breakdown->score = score;
  a.report = DiscrepancyReport{};
  return a;
}

Attempt errored_attempt(int index) {
  Attempt a;
  a.index = index;
  a.outcome.error = ErrorReport{};
  return a;
}

}  // namespace

TEST_CASE("best tracker keeps the first strictly highest score") {
  BestTracker t;
  t = update_best(t, errored_attempt(1));
  CHECK_FALSE(t.best_index);
  t = update_best(t, scored_attempt(2, 60));
  CHECK(t.best_index == 2);
  t = update_best(t, scored_attempt(3, 60));
  CHECK(t.best_index == 2);
  t = update_best(t, scored_attempt(4, 40));
  CHECK(t.best_index == 2);
  t = update_best(t, errored_attempt(5));
  CHECK(t.best_index == 2);
  t = update_best(t, scored_attempt(6, 61));
  CHECK(t.best_index == 6);
  CHECK(t.best_score == 61);
  CHECK(t.best_source == "code 6");
}

TEST_CASE("run config validation") {
  RunConfig c;
  c.llm_mode = LlmMode::kReplay;
  CHECK_THROWS_AS(c.validate(), Error);
  c.transcript = "t.jsonl";
  CHECK_NOTHROW(c.validate());
  c.threshold = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.threshold = 101;
  CHECK_THROWS_AS(c.validate(), Error);
  c.threshold = 95;
  c.max_attempts = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("end-to-end replay succeeds at attempt 3") {
  TempDir dir;
  auto l = run_scenario("e2e_success", dir / "run");
  CHECK(l.status == RunStatus::kSuccess);
  CHECK(l.counters.trials == 3);
  CHECK(l.counters.errors == 1);
  CHECK(l.counters.completed == 2);
  CHECK(l.best.best_index == 3);
  CHECK(l.best.best_score == 100);
  REQUIRE(l.attempts.size() == 3);
  CHECK(l.attempts[0].errored);
  CHECK(l.attempts[0].phase == ErrorPhase::kRuntime);
  CHECK(l.attempts[0].exception_type == "NameError");
  CHECK(l.attempts[1].score == 60);
  CHECK(l.attempts[2].score == 100);
  CHECK(l.attempts[2].llm_calls == 5);
  CHECK(l.reference_source == "user");
  CHECK(l.warnings.empty());

  const auto out = dir / "run";
  for (const char* f : {"run.json", "report.md", "summary.md", "instructions.md", "reference.json",
                        "attempts/001/prompt.txt", "attempts/001/reply.txt", "attempts/001/code.src",
                        "attempts/001/error.json", "attempts/001/report.md", "attempts/002/score.json",
                        "attempts/002/output.json", "attempts/003/report.md"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  CHECK(load_ledger(out).attempts == l.attempts);
  auto report = render_run_report(out);
  CHECK(report.find("| 3 | 1 | 2 | 100 | 3 |") != std::string::npos);
  CHECK(report.find("Status: success") != std::string::npos);
}

TEST_CASE("attempt 2 prompt carries the error report of attempt 1") {
  TempDir dir;
  run_scenario("e2e_success", dir / "run");
  auto p2 = read_file(dir / "run" / "attempts" / "002" / "prompt.txt");
  CHECK(p2.find("# PREVIOUS ATTEMPT") != std::string::npos);
  CHECK(p2.find("# BEST ATTEMPT") == std::string::npos);
  CHECK(p2.find("NameError") != std::string::npos);
  CHECK(p2.find(read_file(dir / "run" / "attempts" / "001" / "code.src")) != std::string::npos);
  auto p3 = read_file(dir / "run" / "attempts" / "003" / "prompt.txt");
  CHECK(p3.find("# BEST ATTEMPT / PREVIOUS ATTEMPT") != std::string::npos);
  CHECK(p3.find("alignment score 60/100") != std::string::npos);
}

TEST_CASE("exhaustion keeps the best-scoring attempt") {
  TempDir dir;
  auto l = run_scenario("exhaustion", dir / "run");
  CHECK(l.status == RunStatus::kExhausted);
  CHECK(l.counters.trials == 5);
  CHECK(l.counters.errors == 1);
  int max_score = -1;
  for (const auto& a : l.attempts) max_score = std::max(max_score, a.score.value_or(-1));
  CHECK(l.best.best_score == max_score);
  CHECK(l.best.best_score == 55);
  CHECK(l.best.best_index == 3);
  auto p5 = read_file(dir / "run" / "attempts" / "005" / "prompt.txt");
  CHECK(p5.find("# BEST ATTEMPT\n") != std::string::npos);
  CHECK(p5.find("# PREVIOUS ATTEMPT\n") != std::string::npos);
}

TEST_CASE("judge narrative is attached while the score stays deterministic") {
  TempDir dir;
  auto l = run_scenario("e2e_judge", dir / "run");
  CHECK(l.status == RunStatus::kSuccess);
  CHECK(l.attempts[1].score == 60);
  auto report = read_file(dir / "run" / "attempts" / "002" / "report.md");
  CHECK(report.find(trim(fixture_text("replies/judge_seed42.md")).substr(0, 40)) != std::string::npos);
  bool logged = false;
  for (const auto& w : l.warnings) logged |= w.find("judge opinion 62") != std::string::npos;
  CHECK(logged);
}

TEST_CASE("reference transcribed from the paper") {
  TempDir dir;
  auto l = run_scenario("e2e_transcribed", dir / "run");
  CHECK(l.status == RunStatus::kSuccess);
  CHECK(l.reference_source == "transcribed");
  CHECK(l.step1_llm_calls == 3);
  CHECK(load_reference(dir / "run" / "reference.json") ==
        load_reference(fixture("reference/seed42_reference.json")));
}

TEST_CASE("a reply without code is an output-parse error and the loop continues") {
  TempDir dir;
  auto l = run_scenario("no_code", dir / "run");
  CHECK(l.status == RunStatus::kSuccess);
  REQUIRE(l.attempts.size() == 2);
  CHECK(l.attempts[0].phase == ErrorPhase::kOutputParse);
  CHECK(l.attempts[0].exception_type == "NoCodeFound");
  CHECK_FALSE(fs::exists(dir / "run" / "attempts" / "001" / "code.src"));
}

TEST_CASE("threshold 100 and a perfect first attempt end after one trial") {
  TempDir dir;
  const auto& s = scenario("no_code");
  auto inputs = scenario_inputs(s);
  auto cfg = scenario_config(s, dir / "run");
  cfg.threshold = 100;
  auto entries = read_transcript(*cfg.transcript);
  entries.erase(entries.begin() + 2);
  entries[2].index = 2;
  ReplayGateway g(entries);
  auto l = run(scenario_bundle(inputs), inputs, cfg, g);
  CHECK(l.status == RunStatus::kSuccess);
  CHECK(l.counters.trials == 1);
}

TEST_CASE("an exhausted transcript aborts the run") {
  TempDir dir;
  const auto& s = scenario("e2e_success");
  auto inputs = scenario_inputs(s);
  auto cfg = scenario_config(s, dir / "run");
  auto entries = read_transcript(*cfg.transcript);
  entries.resize(3);
  ReplayGateway g(entries);
  auto l = run(scenario_bundle(inputs), inputs, cfg, g);
  CHECK(l.status == RunStatus::kAborted);
  REQUIRE(l.abort_cause);
  CHECK(l.abort_cause->find("TranscriptExhausted") != std::string::npos);
  CHECK(l.counters.trials == 1);
  CHECK(fs::exists(dir / "run" / "report.md"));
  ReplayGateway again(entries);
  CHECK_THROWS_AS(resume(dir / "run", again), Error);
}

TEST_CASE("a missing harness aborts with a spawn failure") {
  TempDir dir;
  const auto& s = scenario("e2e_success");
  auto inputs = scenario_inputs(s);
  auto cfg = scenario_config(s, dir / "run");
  cfg.harness = {"/nonexistent/harness"};
  ReplayGateway g(read_transcript(*cfg.transcript));
  auto l = run(scenario_bundle(inputs), inputs, cfg, g);
  CHECK(l.status == RunStatus::kAborted);
  CHECK(l.abort_cause->find("SpawnFailure") != std::string::npos);
}

TEST_CASE("interrupt after attempt 2 and resume gives the same ledger") {
  TempDir dir;
  auto full = run_scenario("e2e_success", dir / "full");

  std::stop_source source;
  RunHooks hooks;
  hooks.after_attempt = [&](const RunLedger&, const Attempt& a) {
    if (a.index == 2) source.request_stop();
  };
  auto partial = run_scenario("e2e_success", dir / "split", source.get_token(), hooks);
  CHECK(partial.status == RunStatus::kRunning);
  CHECK(partial.attempts.size() == 2);
  CHECK(load_ledger(dir / "split").status == RunStatus::kRunning);

  // Leftovers of an attempt that never reached the ledger are discarded.
  write_file(dir / "split" / "attempts" / "003" / "reply.txt", "half written");

  ReplayGateway g(read_transcript(fixture("transcripts/e2e_success.jsonl")), true);
  auto resumed = resume(dir / "split", g);
  CHECK(resumed.status == RunStatus::kSuccess);
  CHECK(ledgers_structurally_equal(read_file(dir / "full" / "run.json"), read_file(dir / "split" / "run.json")));
  CHECK(read_file(dir / "full" / "attempts" / "003" / "prompt.txt") ==
        read_file(dir / "split" / "attempts" / "003" / "prompt.txt"));
}

TEST_CASE("interrupt during step 1 resumes from scratch") {
  TempDir dir;
  std::stop_source source;
  source.request_stop();
  auto partial = run_scenario("e2e_success", dir / "run", source.get_token());
  CHECK(partial.status == RunStatus::kRunning);
  CHECK_FALSE(partial.step1_done);
  ReplayGateway g(read_transcript(fixture("transcripts/e2e_success.jsonl")), true);
  auto resumed = resume(dir / "run", g);
  CHECK(resumed.status == RunStatus::kSuccess);
  CHECK(resumed.counters.trials == 3);
}

TEST_CASE("resuming a finished run changes nothing") {
  TempDir dir;
  run_scenario("e2e_success", dir / "run");
  const auto before = read_file(dir / "run" / "run.json");
  ReplayGateway g({});
  auto l = resume(dir / "run", g);
  CHECK(l.status == RunStatus::kSuccess);
  CHECK(g.calls() == 0);
  CHECK(read_file(dir / "run" / "run.json") == before);
}

TEST_CASE("resume detects a damaged run directory") {
  TempDir dir;
  std::stop_source source;
  RunHooks hooks;
  hooks.after_attempt = [&](const RunLedger&, const Attempt& a) {
    if (a.index == 2) source.request_stop();
  };
  run_scenario("e2e_success", dir / "run", source.get_token(), hooks);
  fs::remove_all(dir / "run" / "attempts" / "002");
  ReplayGateway g(read_transcript(fixture("transcripts/e2e_success.jsonl")));
  try {
    resume(dir / "run", g);
    FAIL("expected CorruptLedger");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCorruptLedger);
  }
}

TEST_CASE("score tampering is detected on resume") {
  TempDir dir;
  std::stop_source source;
  RunHooks hooks;
  hooks.after_attempt = [&](const RunLedger&, const Attempt& a) {
    if (a.index == 2) source.request_stop();
  };
  run_scenario("e2e_success", dir / "run", source.get_token(), hooks);
  auto b = breakdown_from_json(read_file(dir / "run" / "attempts" / "002" / "score.json"));
  b.score = 99;
  write_file(dir / "run" / "attempts" / "002" / "score.json", breakdown_to_json(b));
  ReplayGateway g(read_transcript(fixture("transcripts/e2e_success.jsonl")));
  CHECK_THROWS_AS(resume(dir / "run", g), Error);
}

TEST_CASE("resuming an exhausted run with no budget left stays exhausted") {
  TempDir dir;
  auto l = run_scenario("exhaustion", dir / "run");
  REQUIRE(l.status == RunStatus::kExhausted);
  ReplayGateway g(read_transcript(fixture("transcripts/exhaustion.jsonl")));
  auto again = resume(dir / "run", g);
  CHECK(again.status == RunStatus::kExhausted);
  CHECK(again.counters.trials == 5);
}

TEST_CASE("a second run into the same directory is refused") {
  TempDir dir;
  run_scenario("e2e_success", dir / "run");
  CHECK_THROWS_AS(run_scenario("e2e_success", dir / "run"), Error);
}

TEST_CASE("ledger json round trip and corruption") {
  TempDir dir;
  auto l = run_scenario("exhaustion", dir / "run");
  auto text = read_file(dir / "run" / "run.json");
  auto back = ledger_from_json(text);
  CHECK(ledger_to_json(back) == text);
  CHECK(back.attempts == l.attempts);
  CHECK(back.config.max_attempts == 5);
  CHECK_THROWS_AS(ledger_from_json("{}"), Error);
  CHECK_THROWS_AS(ledger_from_json("not json"), Error);
  CHECK_THROWS_AS(load_ledger(dir / "nowhere"), Error);
  CHECK(ledgers_structurally_equal(text, text));
  CHECK_FALSE(ledgers_structurally_equal(text, "{}"));
}

TEST_CASE("enum names round trip") {
  for (auto m : {LlmMode::kLive, LlmMode::kRecord, LlmMode::kReplay}) CHECK(llm_mode_from_name(llm_mode_name(m)) == m);
  for (auto s : {RunStatus::kRunning, RunStatus::kSuccess, RunStatus::kExhausted, RunStatus::kAborted}) {
    CHECK(run_status_from_name(run_status_name(s)) == s);
  }
}
