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

// All model traffic goes through a Gateway. Live mode talks HTTP to a
// chat-completions style endpoint; replay mode serves a recorded transcript
// so runs are deterministic and offline.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repcheck/error.hpp"

namespace repcheck {

enum class RoleTag { kSummary, kInstruction, kTranscription, kCodegen, kJudge };

std::string_view role_name(RoleTag role);
std::optional<RoleTag> role_from_name(std::string_view name);

struct Attachment {
  std::string filename;
  std::string mime_type;
  std::string bytes;
};

struct PromptRequest {
  RoleTag role = RoleTag::kSummary;
  std::string system_text;
  std::string user_text;
  std::vector<Attachment> attachments;
  int max_output_tokens = 16000;
  double temperature = 0.0;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct CompletionText {
  std::string text;
  std::string finish_reason = "complete";
  TokenUsage usage;
};

/// Content hash over role, system text, user text and attachment bytes.
/// Sampling parameters are deliberately excluded.
std::string digest(const PromptRequest& request);

struct TranscriptEntry {
  std::size_t index = 0;
  RoleTag role = RoleTag::kSummary;
  std::string request_digest;
  std::string response_text;

  bool operator==(const TranscriptEntry&) const = default;
};

// Line-delimited JSON, one entry per line. Indices must run 0,1,2,...
std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path);
std::string transcript_line(const TranscriptEntry& entry);

class Gateway {
 public:
  virtual ~Gateway() = default;
  virtual CompletionText complete(const PromptRequest& request) = 0;
  // Number of completions served so far (including any skipped by seek).
  virtual std::size_t calls() const = 0;
  // Positions the gateway after `consumed` earlier calls; used on resume.
  virtual void seek(std::size_t consumed) = 0;
  virtual Warnings take_warnings() { return {}; }
};

/// One network round trip. Implementations throw TransientProviderError for
/// failures worth retrying and Error(kProviderError) otherwise.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual CompletionText send(const PromptRequest& request) = 0;
};

class TransientProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HttpProviderConfig {
  std::string url;  // full endpoint URL, e.g. https://host/v1/chat/completions
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{600};

  // Reads REPCHECK_API_URL, REPCHECK_API_KEY, REPCHECK_MODEL.
  static HttpProviderConfig from_environment();
};

class HttpChatProvider final : public Provider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config);
  CompletionText send(const PromptRequest& request) override;

  // Request body as sent on the wire; exposed for tests.
  std::string request_body(const PromptRequest& request) const;
  static CompletionText parse_response(std::string_view body);

 private:
  HttpProviderConfig config_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};  // doubles each retry
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread
};

/// Live mode; records every exchange when a transcript path is given.
class LiveGateway final : public Gateway {
 public:
  LiveGateway(std::shared_ptr<Provider> provider, RetryPolicy retry = {},
              std::optional<std::filesystem::path> record_to = std::nullopt);

  CompletionText complete(const PromptRequest& request) override;
  std::size_t calls() const override;
  // Record mode: truncates the transcript file to `consumed` entries.
  void seek(std::size_t consumed) override;

 private:
  std::shared_ptr<Provider> provider_;
  RetryPolicy retry_;
  std::optional<std::filesystem::path> record_to_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

/// Serves a transcript strictly in order. A digest mismatch is a warning, or
/// Error(kDigestMismatch) in strict mode.
class ReplayGateway final : public Gateway {
 public:
  explicit ReplayGateway(std::vector<TranscriptEntry> entries, bool strict = false);
  static ReplayGateway from_file(const std::filesystem::path& path, bool strict = false);

  CompletionText complete(const PromptRequest& request) override;
  std::size_t calls() const override;
  void seek(std::size_t consumed) override;
  Warnings take_warnings() override;

 private:
  std::vector<TranscriptEntry> entries_;
  bool strict_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  Warnings warnings_;
};

}  // namespace repcheck
