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

// Shared helpers for the unit, acceptance and tool binaries.

#include <atomic>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "repcheck/llm_gateway.hpp"
#include "repcheck/util.hpp"

namespace repcheck::testing {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(REPCHECK_FIXTURE_DIR); }
inline fs::path fixture(const std::string& rel) { return fixture_dir() / rel; }
inline std::string fixture_text(const std::string& rel) { return read_file(fixture(rel)); }
inline std::vector<std::string> harness_command() { return {REPCHECK_FIXTURE_HARNESS}; }
inline fs::path cli_path() { return fs::path(REPCHECK_CLI_PATH); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("repcheck-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

/// Provider that serves canned replies in order and remembers every request.
class ScriptedProvider final : public Provider {
 public:
  explicit ScriptedProvider(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  CompletionText send(const PromptRequest& request) override {
    std::lock_guard lock(mu_);
    requests.push_back(request);
    if (failures_before_success > 0) {
      --failures_before_success;
      throw TransientProviderError("scripted transient failure");
    }
    if (always_fail) throw Error(ErrorCode::kProviderError, "scripted provider failure");
    if (next_ >= replies_.size()) throw Error(ErrorCode::kProviderError, "script exhausted");
    return CompletionText{replies_[next_++], "complete", {}};
  }

  std::vector<PromptRequest> requests;
  int failures_before_success = 0;
  bool always_fail = false;

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

inline std::vector<std::string> reply_texts(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(fixture_text("replies/" + n));
  return out;
}

}  // namespace repcheck::testing
