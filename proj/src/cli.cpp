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

#include "repcheck/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "repcheck/controller.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

namespace fs = std::filesystem;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_interrupt(int) { g_interrupted = 1; }

// Turns SIGINT/SIGTERM into a stop request for the running loop.
class InterruptGuard {
 public:
  InterruptGuard() {
    g_interrupted = 0;
    old_int_ = std::signal(SIGINT, on_interrupt);
    old_term_ = std::signal(SIGTERM, on_interrupt);
    watcher_ = std::jthread([this](std::stop_token st) {
      while (!st.stop_requested()) {
        if (g_interrupted) {
          source_.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
    });
  }
  ~InterruptGuard() {
    watcher_.request_stop();
    watcher_.join();
    std::signal(SIGINT, old_int_);
    std::signal(SIGTERM, old_term_);
  }
  std::stop_token token() const { return source_.get_token(); }

 private:
  std::stop_source source_;
  std::jthread watcher_;
  void (*old_int_)(int) = nullptr;
  void (*old_term_)(int) = nullptr;
};

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg) {
  switch (cfg.llm_mode) {
    case LlmMode::kReplay:
      return std::make_unique<ReplayGateway>(read_transcript(*cfg.transcript), cfg.strict_replay);
    case LlmMode::kRecord:
    case LlmMode::kLive: {
      auto provider = std::make_shared<HttpChatProvider>(HttpProviderConfig::from_environment());
      std::optional<fs::path> record;
      if (cfg.llm_mode == LlmMode::kRecord) record = cfg.transcript;
      return std::make_unique<LiveGateway>(provider, RetryPolicy{}, record);
    }
  }
  return nullptr;
}

RunHooks console_hooks(std::ostream& err) {
  RunHooks hooks;
  hooks.log = [&err](const std::string& m) { err << "warning: " << m << "\n"; };
  hooks.after_attempt = [&err](const RunLedger& l, const Attempt& a) {
    err << "attempt " << a.index << ": ";
    if (a.breakdown) {
      err << "score " << a.breakdown->score;
    } else {
      err << "error (" << phase_name(a.outcome.error->phase) << ", " << a.outcome.error->exception_type
          << ")";
    }
    err << "; best " << (l.best.best_index ? std::to_string(l.best.best_score) : "-") << "\n";
  };
  return hooks;
}

int finish(const RunLedger& l, std::ostream& out, std::ostream& err) {
  out << "status=" << run_status_name(l.status) << "\n";
  if (l.best.best_index) {
    out << "best=" << l.best.best_score << " attempt=" << *l.best.best_index << "\n";
  } else {
    out << "best=none\n";
  }
  out << "report=" << (l.config.out_dir / "report.md").string() << "\n";
  switch (l.status) {
    case RunStatus::kSuccess: return kExitSuccess;
    case RunStatus::kExhausted: return kExitExhausted;
    case RunStatus::kAborted:
      err << "run aborted: " << l.abort_cause.value_or("unknown cause") << "\n";
      return kExitAborted;
    case RunStatus::kRunning:
      err << "run interrupted; continue with: repcheck resume " << l.config.out_dir.string() << "\n";
      return kExitAborted;
  }
  return kExitAborted;
}

// Splices entries of `run --config FILE` into the argument list as flags.
// Flags already on the command line win over the file.
std::vector<std::string> expand_run_config(std::vector<std::string> args) {
  if (args.empty() || args.front() != "run") return args;
  std::string file;
  for (auto it = args.begin(); it != args.end(); ++it) {
    if (*it == "--config" && std::next(it) != args.end()) file = *std::next(it);
    if (it->starts_with("--config=")) file = it->substr(9);
  }
  if (file.empty() || !fs::is_regular_file(file)) return args;  // CLI11 reports the bad path
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
  };
  std::vector<std::string> extra;
  for (const auto& item : CLI::ConfigTOML().from_file(file)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "run")) continue;
    const std::string flag = "--" + item.name;
    if (flag == "--config" || given(flag)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") extra.push_back(flag);
      continue;
    }
    for (const auto& v : item.inputs) {
      extra.push_back(flag);
      extra.push_back(v);
    }
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

struct RunFlags {
  std::string paper, codebook, data, target, reference, paper_document, transcript, out = "repcheck-run";
  std::string llm = "live";
  std::string harness = "repcheck-harness";
  int threshold = 95;
  int max_attempts = 100;
  double timeout = 300;
  std::size_t max_output_bytes = 10u << 20;
  bool judge = false;
  bool strict_replay = false;
  std::vector<std::string> aliases;
};

struct ScoreFlags {
  std::string reference, candidate;
  int threshold = 95;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reproduce a published statistical result from its paper, codebook and data."};
  app.name("repcheck");
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Run the replication loop for one target.");
  std::string config_file;
  run_cmd->add_option("--config", config_file, "TOML/INI file with flag defaults (e.g. threshold = 90)")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--paper", rf.paper, "Article text file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--codebook", rf.codebook, "Codebook text file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--data", rf.data, "Dataset (CSV)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--target", rf.target, "Table or figure to reproduce, e.g. \"Table 1\"")->required();
  run_cmd->add_option("--reference", rf.reference, "Canonical-result JSON of the published target")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--paper-document", rf.paper_document, "Original document forwarded to the model")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--threshold", rf.threshold, "Success threshold")->check(CLI::Range(1, 100));
  run_cmd->add_option("--max-attempts", rf.max_attempts, "Attempt budget")->check(CLI::PositiveNumber);
  run_cmd->add_option("--llm", rf.llm, "live, record or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  run_cmd->add_option("--transcript", rf.transcript, "Transcript file for record/replay");
  run_cmd->add_flag("--judge", rf.judge, "Attach a model-written narrative to reports");
  run_cmd->add_flag("--strict-replay", rf.strict_replay, "Fail on replay digest mismatch");
  run_cmd->add_option("--out", rf.out, "Run directory");
  run_cmd->add_option("--harness", rf.harness, "Harness command (may include arguments)");
  run_cmd->add_option("--timeout", rf.timeout, "Wall-clock seconds per execution")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-output-bytes", rf.max_output_bytes, "Output cap per execution")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--alias", rf.aliases, "Extra label alias, from=to (repeatable)");

  std::string resume_dir;
  std::string resume_transcript;
  bool resume_strict = false;
  auto* resume_cmd = app.add_subcommand("resume", "Continue an interrupted run.");
  resume_cmd->add_option("run_dir", resume_dir, "Run directory")->required();
  resume_cmd->add_option("--transcript", resume_transcript, "Override the stored transcript path");
  resume_cmd->add_flag("--strict-replay", resume_strict, "Fail on replay digest mismatch");

  ScoreFlags sf;
  auto* score_cmd = app.add_subcommand("score", "Score a candidate result against a reference.");
  score_cmd->add_option("--reference", sf.reference, "Published result JSON")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--candidate", sf.candidate, "Generated result JSON")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--threshold", sf.threshold, "Success threshold")->check(CLI::Range(1, 100));

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Print the consolidated report of a run.");
  report_cmd->add_option("run_dir", report_dir, "Run directory")->required();

  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  try {
    args = expand_run_config(std::move(args));
  } catch (const CLI::ParseError& e) {
    err << "config file: " << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    if (code != 0) err << "\n" << app.help();
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (*score_cmd) {
      try {
        auto reference = load_reference(sf.reference);
        auto candidate = load_reference(sf.candidate);
        auto breakdown = score(reference, candidate);
        out << breakdown_to_json(breakdown);
        return breakdown.score >= sf.threshold ? kExitSuccess : kExitExhausted;
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitAborted;
      }
    }

    if (*report_cmd) {
      try {
        out << render_run_report(report_dir);
        return kExitSuccess;
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitAborted;
      }
    }

    if (*resume_cmd) {
      RunLedger stored;
      try {
        stored = load_ledger(resume_dir);
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitAborted;
      }
      auto cfg = stored.config;
      if (!resume_transcript.empty()) cfg.transcript = resume_transcript;
      cfg.strict_replay = cfg.strict_replay || resume_strict;
      auto gateway = make_gateway(cfg);
      InterruptGuard guard;
      auto ledger = resume(resume_dir, *gateway, guard.token(), console_hooks(err));
      return finish(ledger, out, err);
    }

    // run
    RunConfig cfg;
    cfg.threshold = rf.threshold;
    cfg.max_attempts = rf.max_attempts;
    cfg.limits.wall_clock = std::chrono::milliseconds(static_cast<long long>(rf.timeout * 1000.0));
    cfg.limits.max_output_bytes = rf.max_output_bytes;
    cfg.judge_enabled = rf.judge;
    cfg.llm_mode = *llm_mode_from_name(rf.llm);
    if (!rf.transcript.empty()) cfg.transcript = fs::absolute(rf.transcript);
    cfg.strict_replay = rf.strict_replay;
    cfg.harness = split_words(rf.harness);
    cfg.out_dir = rf.out;
    for (const auto& a : rf.aliases) {
      auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
        err << "--alias expects from=to, got \"" << a << "\"\n";
        return kExitUsage;
      }
      cfg.extra_aliases[normalize_label(a.substr(0, eq))] = normalize_label(a.substr(eq + 1));
    }
    if (cfg.llm_mode != LlmMode::kLive && !cfg.transcript) {
      err << "--llm " << rf.llm << " requires --transcript\n";
      return kExitUsage;
    }
    if (cfg.llm_mode == LlmMode::kReplay && !fs::exists(*cfg.transcript)) {
      err << "transcript " << cfg.transcript->string() << " does not exist\n";
      return kExitUsage;
    }
    if (cfg.llm_mode == LlmMode::kRecord && fs::exists(*cfg.transcript) &&
        fs::file_size(*cfg.transcript) > 0) {
      err << "transcript " << cfg.transcript->string()
          << " already has entries; record a fresh run into a new file\n";
      return kExitUsage;
    }
    if (fs::exists(fs::path(rf.out) / "run.json")) {
      err << rf.out << " already holds a run; use `repcheck resume " << rf.out << "`\n";
      return kExitUsage;
    }

    RunInputs inputs;
    inputs.paper = fs::absolute(rf.paper);
    inputs.codebook = fs::absolute(rf.codebook);
    inputs.data = fs::absolute(rf.data);
    inputs.target = rf.target;
    if (!rf.reference.empty()) inputs.reference = fs::absolute(rf.reference);
    if (!rf.paper_document.empty()) inputs.paper_document = fs::absolute(rf.paper_document);

    PaperBundle bundle;
    try {
      bundle = load_bundle(inputs.paper, inputs.codebook, inputs.data, inputs.target, inputs.paper_document);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return e.code() == ErrorCode::kPreconditionViolation ? kExitUsage : kExitAborted;
    }
    auto gateway = make_gateway(cfg);
    InterruptGuard guard;
    auto ledger = run(bundle, inputs, cfg, *gateway, guard.token(), console_hooks(err));
    return finish(ledger, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::kPreconditionViolation ? kExitUsage : kExitAborted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAborted;
  }
}

}  // namespace repcheck
