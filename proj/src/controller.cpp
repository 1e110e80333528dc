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

#include "repcheck/controller.hpp"

#include <chrono>

#include "json.hpp"
#include "repcheck/prompts.hpp"
#include "repcheck/spec_gen.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view llm_mode_name(LlmMode mode) {
  switch (mode) {
    case LlmMode::kLive: return "live";
    case LlmMode::kRecord: return "record";
    case LlmMode::kReplay: return "replay";
  }
  return "live";
}

std::optional<LlmMode> llm_mode_from_name(std::string_view name) {
  for (auto m : {LlmMode::kLive, LlmMode::kRecord, LlmMode::kReplay}) {
    if (llm_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kSuccess: return "success";
    case RunStatus::kExhausted: return "exhausted";
    case RunStatus::kAborted: return "aborted";
  }
  return "running";
}

std::optional<RunStatus> run_status_from_name(std::string_view name) {
  for (auto s : {RunStatus::kRunning, RunStatus::kSuccess, RunStatus::kExhausted,
                 RunStatus::kAborted}) {
    if (run_status_name(s) == name) return s;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  require(threshold > 0 && threshold <= 100, "threshold must be in (0, 100]");
  require(max_attempts >= 1, "max_attempts must be >= 1");
  require(limits.wall_clock.count() > 0, "wall-clock limit must be positive");
  require(limits.max_output_bytes > 0, "output limit must be positive");
  require(!harness.empty() && !harness.front().empty(), "harness command is empty");
  require(llm_mode == LlmMode::kLive || transcript.has_value(),
          "record and replay modes need a transcript path");
}

BestTracker update_best(BestTracker tracker, const Attempt& attempt) {
  if (!attempt.breakdown || !attempt.source) return tracker;
  if (attempt.breakdown->score <= tracker.best_score) return tracker;
  tracker.best_index = attempt.index;
  tracker.best_score = attempt.breakdown->score;
  tracker.best_source = attempt.source->code_text;
  tracker.best_report = attempt.report ? attempt.report->render_markdown(attempt.breakdown->score)
                                       : std::string{};
  return tracker;
}

// ---------------------------------------------------------------------------
// run.json

namespace {

json optional_path(const std::optional<fs::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::kCorruptLedger, what); }

template <typename T>
T get_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) corrupt(std::string("run.json lacks field ") + key);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    corrupt(std::string("run.json field ") + key + " has the wrong type");
  }
}

std::optional<fs::path> get_optional_path(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) corrupt(std::string("run.json field ") + key + " has the wrong type");
  return fs::path(it->get<std::string>());
}

}  // namespace

std::string ledger_to_json(const RunLedger& l) {
  json j;
  j["format"] = "repcheck-run/1";
  j["status"] = run_status_name(l.status);
  j["abort_cause"] = l.abort_cause ? json(*l.abort_cause) : json(nullptr);

  const auto& c = l.config;
  json cfg;
  cfg["threshold"] = c.threshold;
  cfg["max_attempts"] = c.max_attempts;
  cfg["wall_clock_ms"] = c.limits.wall_clock.count();
  cfg["max_output_bytes"] = c.limits.max_output_bytes;
  cfg["term_grace_ms"] = c.limits.term_grace.count();
  cfg["judge"] = c.judge_enabled;
  cfg["llm_mode"] = llm_mode_name(c.llm_mode);
  cfg["transcript"] = optional_path(c.transcript);
  cfg["strict_replay"] = c.strict_replay;
  cfg["harness"] = c.harness;
  cfg["aliases"] = c.extra_aliases;
  j["config"] = std::move(cfg);

  json in;
  in["paper"] = l.inputs.paper.string();
  in["codebook"] = l.inputs.codebook.string();
  in["data"] = l.inputs.data.string();
  in["target"] = l.inputs.target;
  in["reference"] = optional_path(l.inputs.reference);
  in["paper_document"] = optional_path(l.inputs.paper_document);
  j["inputs"] = std::move(in);

  json s1;
  s1["done"] = l.step1_done;
  s1["llm_calls"] = l.step1_llm_calls;
  s1["reference_source"] = l.reference_source;
  s1["reference_repaired"] = l.reference_repaired;
  j["step1"] = std::move(s1);

  j["counters"] = {{"trials", l.counters.trials},
                   {"errors", l.counters.errors},
                   {"completed", l.counters.completed}};
  if (l.best.best_index) {
    j["best"] = {{"index", *l.best.best_index}, {"score", l.best.best_score}};
  } else {
    j["best"] = nullptr;
  }

  json attempts = json::array();
  for (const auto& a : l.attempts) {
    json r;
    r["index"] = a.index;
    r["outcome"] = a.errored ? "error" : "completed";
    r["score"] = a.score ? json(*a.score) : json(nullptr);
    r["phase"] = a.phase ? json(phase_name(*a.phase)) : json(nullptr);
    r["exception_type"] = a.exception_type;
    r["prompt_digest"] = a.prompt_digest;
    r["template_hash"] = a.template_hash;
    r["duration_seconds"] = a.duration_seconds;
    r["llm_calls"] = a.llm_calls;
    attempts.push_back(std::move(r));
  }
  j["attempts"] = std::move(attempts);
  j["warnings"] = l.warnings;
  return j.dump(2) + "\n";
}

RunLedger ledger_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_object()) corrupt("run.json is not a JSON object");
  if (get_field<std::string>(j, "format") != "repcheck-run/1") corrupt("unknown run.json format");

  RunLedger l;
  auto status = run_status_from_name(get_field<std::string>(j, "status"));
  if (!status) corrupt("run.json has an unknown status");
  l.status = *status;
  if (auto it = j.find("abort_cause"); it != j.end() && it->is_string()) {
    l.abort_cause = it->get<std::string>();
  }

  const auto cfg = get_field<json>(j, "config");
  auto& c = l.config;
  c.threshold = get_field<int>(cfg, "threshold");
  c.max_attempts = get_field<int>(cfg, "max_attempts");
  c.limits.wall_clock = std::chrono::milliseconds(get_field<long long>(cfg, "wall_clock_ms"));
  c.limits.max_output_bytes = get_field<std::size_t>(cfg, "max_output_bytes");
  c.limits.term_grace = std::chrono::milliseconds(get_field<long long>(cfg, "term_grace_ms"));
  c.judge_enabled = get_field<bool>(cfg, "judge");
  auto mode = llm_mode_from_name(get_field<std::string>(cfg, "llm_mode"));
  if (!mode) corrupt("run.json has an unknown llm_mode");
  c.llm_mode = *mode;
  c.transcript = get_optional_path(cfg, "transcript");
  c.strict_replay = get_field<bool>(cfg, "strict_replay");
  c.harness = get_field<std::vector<std::string>>(cfg, "harness");
  c.extra_aliases = get_field<std::map<std::string, std::string>>(cfg, "aliases");

  const auto in = get_field<json>(j, "inputs");
  l.inputs.paper = get_field<std::string>(in, "paper");
  l.inputs.codebook = get_field<std::string>(in, "codebook");
  l.inputs.data = get_field<std::string>(in, "data");
  l.inputs.target = get_field<std::string>(in, "target");
  l.inputs.reference = get_optional_path(in, "reference");
  l.inputs.paper_document = get_optional_path(in, "paper_document");

  const auto s1 = get_field<json>(j, "step1");
  l.step1_done = get_field<bool>(s1, "done");
  l.step1_llm_calls = get_field<std::size_t>(s1, "llm_calls");
  l.reference_source = get_field<std::string>(s1, "reference_source");
  l.reference_repaired = get_field<bool>(s1, "reference_repaired");

  const auto counters = get_field<json>(j, "counters");
  l.counters = {get_field<int>(counters, "trials"), get_field<int>(counters, "errors"),
                get_field<int>(counters, "completed")};
  if (auto it = j.find("best"); it != j.end() && it->is_object()) {
    l.best.best_index = get_field<int>(*it, "index");
    l.best.best_score = get_field<int>(*it, "score");
  }

  for (const auto& r : get_field<json>(j, "attempts")) {
    AttemptRecord a;
    a.index = get_field<int>(r, "index");
    a.errored = get_field<std::string>(r, "outcome") == "error";
    if (auto it = r.find("score"); it != r.end() && it->is_number_integer()) a.score = it->get<int>();
    if (auto it = r.find("phase"); it != r.end() && it->is_string()) {
      a.phase = phase_from_name(it->get<std::string>());
      if (!a.phase) corrupt("run.json attempt has an unknown phase");
    }
    a.exception_type = get_field<std::string>(r, "exception_type");
    a.prompt_digest = get_field<std::string>(r, "prompt_digest");
    a.template_hash = get_field<std::string>(r, "template_hash");
    a.duration_seconds = get_field<double>(r, "duration_seconds");
    a.llm_calls = get_field<std::size_t>(r, "llm_calls");
    l.attempts.push_back(std::move(a));
  }
  l.warnings = get_field<std::vector<std::string>>(j, "warnings");
  return l;
}

RunLedger load_ledger(const fs::path& out_dir) {
  const auto path = out_dir / "run.json";
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) corrupt("no run ledger at " + path.string());
  auto ledger = ledger_from_json(read_file(path));
  ledger.config.out_dir = out_dir;
  return ledger;
}

bool ledgers_structurally_equal(std::string_view a, std::string_view b) {
  auto strip = [](std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_object() && j.contains("attempts")) {
      for (auto& r : j["attempts"]) r.erase("duration_seconds");
    }
    return j;
  };
  auto ja = strip(a);
  auto jb = strip(b);
  return !ja.is_discarded() && !jb.is_discarded() && ja == jb;
}

// ---------------------------------------------------------------------------
// the loop

namespace {

fs::path attempt_dir(const fs::path& out, int index) {
  return out / "attempts" / attempt_dir_name(index);
}

std::string read_if_exists(const fs::path& path) {
  std::error_code ec;
  return fs::is_regular_file(path, ec) ? read_file(path) : std::string{};
}

std::string prompt_file_text(const PromptRequest& req) {
  return req.system_text + "\n=== USER ===\n" + req.user_text;
}

class Session {
 public:
  Session(const PaperBundle& bundle, RunLedger ledger, Gateway& gateway, std::stop_token stop,
          const RunHooks& hooks)
      : bundle_(bundle),
        ledger_(std::move(ledger)),
        out_(ledger_.config.out_dir),
        gateway_(gateway),
        stop_(std::move(stop)),
        hooks_(hooks) {
    for (const auto& [from, to] : ledger_.config.extra_aliases) scoring_.labels.add_alias(from, to);
  }

  RunLedger drive() {
    try {
      if (!ledger_.step1_done) {
        step1();
      } else {
        reload_step1();
      }
      preview_ = preview_dataset(bundle_.dataset);
      loop();
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::kCancelled:
          break;
        case ErrorCode::kPreconditionViolation:
        case ErrorCode::kCorruptLedger:
          throw;
        default:
          ledger_.status = RunStatus::kAborted;
          ledger_.abort_cause = e.what();
          break;
      }
    }
    drain_warnings();
    persist();
    write_file_atomic(out_ / "report.md", render_run_report(out_));
    return ledger_;
  }

  // Rebuilds the tracker from attempt directories and checks them against the
  // ledger rows.
  void verify_attempts() {
    BestTracker tracker;
    RunCounters counters;
    for (std::size_t k = 0; k < ledger_.attempts.size(); ++k) {
      const auto& rec = ledger_.attempts[k];
      const int expected = static_cast<int>(k) + 1;
      if (rec.index != expected) corrupt("ledger attempt " + std::to_string(expected) + " is out of sequence");
      const auto dir = attempt_dir(out_, rec.index);
      std::error_code ec;
      if (!fs::is_directory(dir, ec)) corrupt("ledger references missing attempt dir " + dir.string());
      if (!fs::exists(dir / "reply.txt") || !fs::exists(dir / "report.md")) {
        corrupt("attempt dir " + dir.string() + " is incomplete");
      }
      ++counters.trials;
      if (rec.errored) {
        ++counters.errors;
        if (!fs::exists(dir / "error.json")) corrupt(dir.string() + " lacks error.json");
        error_report_from_json(read_file(dir / "error.json"));
        continue;
      }
      ++counters.completed;
      if (!fs::exists(dir / "score.json") || !fs::exists(dir / "code.src")) {
        corrupt(dir.string() + " lacks score.json or code.src");
      }
      AlignmentBreakdown b;
      try {
        b = breakdown_from_json(read_file(dir / "score.json"));
      } catch (const std::exception& e) {
        corrupt(dir.string() + "/score.json: " + e.what());
      }
      if (!rec.score || *rec.score != b.score) corrupt(dir.string() + "/score.json disagrees with the ledger");
      if (b.score > tracker.best_score) {
        tracker = {rec.index, b.score, read_file(dir / "code.src"), read_file(dir / "report.md")};
      }
    }
    if (counters != ledger_.counters) corrupt("ledger counters disagree with its attempts");
    if (tracker.best_index != ledger_.best.best_index ||
        (tracker.best_index && tracker.best_score != ledger_.best.best_score)) {
      corrupt("ledger best attempt disagrees with the attempt directories");
    }
    ledger_.best = std::move(tracker);

    // Drop directories of attempts that never reached the ledger.
    std::error_code ec;
    if (fs::is_directory(out_ / "attempts", ec)) {
      for (const auto& entry : fs::directory_iterator(out_ / "attempts")) {
        int idx = 0;
        try {
          idx = std::stoi(entry.path().filename().string());
        } catch (const std::exception&) {
          continue;
        }
        if (idx > static_cast<int>(ledger_.attempts.size())) fs::remove_all(entry.path());
      }
    }
  }

 private:
  void log(const std::string& message) {
    ledger_.warnings.push_back(message);
    if (hooks_.log) hooks_.log(message);
  }

  void drain_warnings() {
    for (const auto& w : gateway_.take_warnings()) log(w.code + ": " + w.message);
  }

  void persist() { write_file_atomic(out_ / "run.json", ledger_to_json(ledger_)); }

  void check_stop() {
    if (stop_.stop_requested()) throw Error(ErrorCode::kCancelled, "run cancelled");
  }

  void step1() {
    check_stop();
    std::optional<CanonicalResult> user_reference;
    if (ledger_.inputs.reference) user_reference = load_reference(*ledger_.inputs.reference);
    std::optional<ResultKind> kind;
    if (user_reference) kind = user_reference->kind();

    summary_ = summarize_target(gateway_, bundle_, kind, out_);
    for (const auto& w : summary_.warnings) log(w.code + ": " + w.message);
    drain_warnings();
    check_stop();
    instructions_ = build_instructions(gateway_, bundle_, summary_, out_);
    for (const auto& w : instructions_.warnings) log(w.code + ": " + w.message);
    drain_warnings();
    if (user_reference) {
      reference_ = std::move(*user_reference);
      ledger_.reference_source = "user";
    } else {
      check_stop();
      auto transcribed = transcribe_reference(gateway_, bundle_, out_);
      drain_warnings();
      reference_ = std::move(transcribed.result);
      ledger_.reference_source = "transcribed";
      ledger_.reference_repaired = transcribed.repaired;
    }
    write_file_atomic(out_ / "reference.json", serialize(*reference_));
    ledger_.step1_done = true;
    ledger_.step1_llm_calls = gateway_.calls();
    persist();
  }

  void reload_step1() {
    for (const char* f : {"summary.md", "instructions.md", "reference.json"}) {
      if (!fs::exists(out_ / f)) corrupt(std::string("run directory lacks ") + f);
    }
    try {
      reference_ = load_reference(out_ / "reference.json");
    } catch (const Error& e) {
      corrupt(std::string("reference.json: ") + e.what());
    }
    summary_ = parse_target_summary(bundle_.target_id, read_file(out_ / "summary.md"), reference_->kind());
    instructions_ = parse_instruction_summary(read_file(out_ / "instructions.md"), bundle_.dataset.columns);
  }

  AttemptFeedback load_feedback(const AttemptRecord& rec) const {
    const auto dir = attempt_dir(out_, rec.index);
    AttemptFeedback fb;
    fb.index = rec.index;
    fb.errored = rec.errored;
    fb.score = rec.score;
    fb.source = fs::exists(dir / "code.src") ? read_file(dir / "code.src") : read_if_exists(dir / "reply.txt");
    fb.report = read_if_exists(dir / "report.md");
    return fb;
  }

  void loop() {
    const auto& cfg = ledger_.config;
    while (ledger_.status == RunStatus::kRunning) {
      if (static_cast<int>(ledger_.attempts.size()) >= cfg.max_attempts) {
        ledger_.status = RunStatus::kExhausted;
        break;
      }
      check_stop();
      run_attempt(static_cast<int>(ledger_.attempts.size()) + 1);
    }
  }

  void run_attempt(int index) {
    const auto& cfg = ledger_.config;
    const auto started = std::chrono::steady_clock::now();
    const auto dir = attempt_dir(out_, index);
    fs::remove_all(dir);
    fs::create_directories(dir);

    AttemptContext ctx;
    ctx.attempt_index = index;
    ctx.target_id = bundle_.target_id;
    ctx.summary = &summary_;
    ctx.instructions = &instructions_;
    ctx.preview = &preview_;
    ctx.row_count = bundle_.dataset.row_count;
    if (!ledger_.attempts.empty()) ctx.previous = load_feedback(ledger_.attempts.back());
    if (ledger_.best.best_index) {
      ctx.best = AttemptFeedback{*ledger_.best.best_index, ledger_.best.best_source,
                                 ledger_.best.best_report, false, ledger_.best.best_score};
    }

    Attempt attempt;
    attempt.index = index;
    const auto request = build_codegen_prompt(ctx);
    write_file(dir / "prompt.txt", prompt_file_text(request));
    attempt.prompt_digest = digest(request);
    attempt.reply = gateway_.complete(request).text;
    drain_warnings();
    write_file(dir / "reply.txt", attempt.reply);

    try {
      attempt.source = extract_code(attempt.reply, index);
      write_file(dir / "code.src", attempt.source->code_text);
      attempt.outcome = execute(*attempt.source, bundle_.dataset.path, cfg.limits, dir / "work",
                                cfg.harness, stop_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCodeFound) throw;
      ErrorReport r;
      r.phase = ErrorPhase::kOutputParse;
      r.exception_type = "NoCodeFound";
      r.message = e.detail() + "; reply with one fenced code block that defines " +
                  std::string(kEntrypoint);
      attempt.outcome.error = std::move(r);
    }

    std::vector<std::string> figures;
    if (!attempt.outcome.figure_files.empty()) {
      fs::create_directories(dir / "figures");
      for (const auto& f : attempt.outcome.figure_files) {
        auto target = dir / "figures" / f.filename();
        fs::copy_file(f, target, fs::copy_options::overwrite_existing);
        figures.push_back(target.string());
      }
    }

    AttemptRecord rec;
    rec.index = index;
    rec.prompt_digest = attempt.prompt_digest;
    rec.template_hash = prompt_template(kCodegenTemplate).hash;
    if (attempt.outcome.result) {
      const auto& candidate = *attempt.outcome.result;
      write_file(dir / "output.json", serialize(candidate));
      attempt.breakdown = score(*reference_, candidate, scoring_);
      attempt.report = compose_discrepancy(*reference_, candidate, *attempt.breakdown, scoring_);
      if (cfg.judge_enabled && attempt.breakdown->score < cfg.threshold) {
        auto verdict = judge(gateway_, *reference_, candidate, figures);
        for (const auto& w : verdict.warnings) log(w.code + ": " + w.message);
        if (verdict.opinion) {
          attempt.report->narrative = verdict.opinion->narrative;
          if (verdict.opinion->score_opinion) {
            log("attempt " + std::to_string(index) + ": judge opinion " +
                std::to_string(*verdict.opinion->score_opinion) + " (deterministic score " +
                std::to_string(attempt.breakdown->score) + ")");
          }
        }
        drain_warnings();
      }
      write_file(dir / "score.json", breakdown_to_json(*attempt.breakdown));
      write_file(dir / "report.md", attempt.report->render_markdown(attempt.breakdown->score));
      rec.score = attempt.breakdown->score;
      ++ledger_.counters.completed;
    } else {
      const auto& err = *attempt.outcome.error;
      write_file(dir / "error.json", error_report_to_json(err));
      write_file(dir / "report.md", "# Error report\n\n" + err.render());
      rec.errored = true;
      rec.phase = err.phase;
      rec.exception_type = err.exception_type;
      ++ledger_.counters.errors;
    }
    ++ledger_.counters.trials;

    attempt.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    rec.duration_seconds = attempt.duration_seconds;
    rec.llm_calls = gateway_.calls();
    ledger_.attempts.push_back(std::move(rec));
    ledger_.best = update_best(std::move(ledger_.best), attempt);
    if (attempt.breakdown && attempt.breakdown->score >= cfg.threshold) {
      ledger_.status = RunStatus::kSuccess;
    }
    persist();
    if (hooks_.after_attempt) hooks_.after_attempt(ledger_, attempt);
  }

  const PaperBundle& bundle_;
  RunLedger ledger_;
  fs::path out_;
  Gateway& gateway_;
  std::stop_token stop_;
  const RunHooks& hooks_;
  ScoringConfig scoring_;
  TargetSummary summary_;
  InstructionSummary instructions_;
  std::optional<CanonicalResult> reference_;
  DataPreview preview_;
};

}  // namespace

RunLedger run(const PaperBundle& bundle, const RunInputs& inputs, const RunConfig& config,
              Gateway& gateway, std::stop_token stop, const RunHooks& hooks) {
  config.validate();
  require(!config.out_dir.empty(), "out_dir is required");
  fs::create_directories(config.out_dir);
  require(!fs::exists(config.out_dir / "run.json"), "out_dir already holds a run; use resume");

  RunLedger ledger;
  ledger.config = config;
  ledger.inputs = inputs;
  write_file_atomic(config.out_dir / "run.json", ledger_to_json(ledger));
  Session session(bundle, std::move(ledger), gateway, std::move(stop), hooks);
  return session.drive();
}

RunLedger resume(const fs::path& out_dir, Gateway& gateway, std::stop_token stop,
                 const RunHooks& hooks) {
  auto ledger = load_ledger(out_dir);
  if (ledger.status == RunStatus::kSuccess) return ledger;
  require(ledger.status != RunStatus::kAborted, "aborted runs cannot be resumed");

  const auto& in = ledger.inputs;
  auto bundle = load_bundle(in.paper, in.codebook, in.data, in.target, in.paper_document);
  std::size_t consumed = 0;
  if (!ledger.attempts.empty()) {
    consumed = ledger.attempts.back().llm_calls;
  } else if (ledger.step1_done) {
    consumed = ledger.step1_llm_calls;
  }
  if (ledger.status == RunStatus::kExhausted &&
      static_cast<int>(ledger.attempts.size()) < ledger.config.max_attempts) {
    ledger.status = RunStatus::kRunning;
  }
  Session session(bundle, std::move(ledger), gateway, std::move(stop), hooks);
  session.verify_attempts();
  gateway.seek(consumed);
  return session.drive();
}

// ---------------------------------------------------------------------------
// consolidated report

std::string render_run_report(const fs::path& out_dir) {
  const auto l = load_ledger(out_dir);
  std::string out = "# Replication run: " + l.inputs.target + "\n\n";
  out += "Status: " + std::string(run_status_name(l.status)) + "\n";
  if (l.abort_cause) out += "Abort cause: " + *l.abort_cause + "\n";

  out += "\n## Configuration\n\n";
  out += "- threshold: " + std::to_string(l.config.threshold) + "\n";
  out += "- max attempts: " + std::to_string(l.config.max_attempts) + "\n";
  out += "- time limit per attempt: " +
         format_number(std::chrono::duration<double>(l.config.limits.wall_clock).count(), 1) + " s\n";
  out += "- llm mode: " + std::string(llm_mode_name(l.config.llm_mode)) + "\n";
  out += "- judge: " + std::string(l.config.judge_enabled ? "on" : "off") + "\n";
  out += "- reference: " + (l.reference_source.empty() ? std::string("pending") : l.reference_source) +
         (l.reference_repaired ? " (after repair)" : "") + "\n";

  out += "\n## Execution summary\n\n";
  out += "| Trials | Errors | Completed | Best score | Best attempt |\n";
  out += "|---|---|---|---|---|\n";
  out += "| " + std::to_string(l.counters.trials) + " | " + std::to_string(l.counters.errors) + " | " +
         std::to_string(l.counters.completed) + " | " +
         (l.best.best_index ? std::to_string(l.best.best_score) : std::string("-")) + " | " +
         (l.best.best_index ? std::to_string(*l.best.best_index) : std::string("-")) + " |\n";

  out += "\n## Score trajectory\n\n";
  if (l.attempts.empty()) {
    out += "No attempts yet.\n";
  } else {
    out += "| Attempt | Outcome | Score | Best so far | Duration (s) |\n";
    out += "|---|---|---|---|---|\n";
    int best = -1;
    for (const auto& a : l.attempts) {
      if (a.score && *a.score > best) best = *a.score;
      std::string outcome = a.errored ? "error (" + std::string(phase_name(a.phase.value_or(ErrorPhase::kRuntime))) +
                                            (a.exception_type.empty() ? "" : ", " + a.exception_type) + ")"
                                      : "completed";
      out += "| " + std::to_string(a.index) + " | " + outcome + " | " +
             (a.score ? std::to_string(*a.score) : std::string("-")) + " | " +
             (best >= 0 ? std::to_string(best) : std::string("-")) + " | " +
             format_number(a.duration_seconds, 1) + " |\n";
    }
  }

  out += "\n## Best attempt\n\n";
  if (!l.best.best_index) {
    out += "No attempt produced a scored result.\n";
  } else {
    const auto dir = attempt_dir(out_dir, *l.best.best_index);
    if (!fs::exists(dir / "report.md")) corrupt("best attempt report missing under " + dir.string());
    out += "Attempt " + std::to_string(*l.best.best_index) + " (" + dir.lexically_relative(out_dir).string() +
           ")\n\n";
    auto report = read_file(dir / "report.md");
    // Demote headings one level so they nest under this section.
    std::string nested;
    for (const auto& line : split_lines(report)) nested += (line.starts_with("#") ? "##" + line : line) + "\n";
    out += nested;
  }
  return out;
}

}  // namespace repcheck
