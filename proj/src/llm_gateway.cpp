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

#include "repcheck/llm_gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "repcheck/util.hpp"

namespace repcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view role_name(RoleTag role) {
  switch (role) {
    case RoleTag::kSummary: return "summary";
    case RoleTag::kInstruction: return "instruction";
    case RoleTag::kTranscription: return "transcription";
    case RoleTag::kCodegen: return "codegen";
    case RoleTag::kJudge: return "judge";
  }
  return "unknown";
}

std::optional<RoleTag> role_from_name(std::string_view name) {
  for (auto role : {RoleTag::kSummary, RoleTag::kInstruction, RoleTag::kTranscription,
                    RoleTag::kCodegen, RoleTag::kJudge}) {
    if (role_name(role) == name) return role;
  }
  return std::nullopt;
}

std::string digest(const PromptRequest& request) {
  // Length-prefixed fields so that moving bytes between fields changes the hash.
  std::string material;
  auto append = [&](std::string_view field) {
    material += std::to_string(field.size());
    material += ':';
    material += field;
  };
  append(role_name(request.role));
  append(request.system_text);
  append(request.user_text);
  for (const auto& a : request.attachments) append(a.bytes);
  return sha256_hex(material);
}

std::string transcript_line(const TranscriptEntry& entry) {
  ordered_json j;
  j["index"] = entry.index;
  j["role_tag"] = std::string(role_name(entry.role));
  j["request_digest"] = entry.request_digest;
  j["response_text"] = entry.response_text;
  return j.dump() + "\n";
}

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path) {
  std::vector<TranscriptEntry> entries;
  const auto text = read_file(path);
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      TranscriptEntry e;
      e.index = j.at("index").get<std::size_t>();
      auto role = role_from_name(j.at("role_tag").get<std::string>());
      if (!role) throw std::runtime_error("unknown role_tag");
      e.role = *role;
      e.request_digest = j.at("request_digest").get<std::string>();
      e.response_text = j.at("response_text").get<std::string>();
      if (e.index != entries.size()) {
        throw std::runtime_error("index " + std::to_string(e.index) + " out of sequence");
      }
      entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::kSchemaViolation,
                  path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

// ---------------------------------------------------------------------------
// HTTP provider

HttpProviderConfig HttpProviderConfig::from_environment() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  HttpProviderConfig cfg;
  cfg.url = env("REPCHECK_API_URL");
  if (cfg.url.empty()) cfg.url = "https://api.openai.com/v1/chat/completions";
  cfg.api_key = env("REPCHECK_API_KEY");
  cfg.model = env("REPCHECK_MODEL");
  if (cfg.api_key.empty()) {
    throw Error(ErrorCode::kProviderError, "REPCHECK_API_KEY is not set");
  }
  if (cfg.model.empty()) throw Error(ErrorCode::kProviderError, "REPCHECK_MODEL is not set");
  return cfg;
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {}

std::string HttpChatProvider::request_body(const PromptRequest& request) const {
  ordered_json body;
  body["model"] = config_.model;
  ordered_json messages = ordered_json::array();
  if (!request.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
  }
  if (request.attachments.empty()) {
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
  } else {
    ordered_json parts = ordered_json::array();
    for (const auto& a : request.attachments) {
      auto data = std::span(reinterpret_cast<const unsigned char*>(a.bytes.data()), a.bytes.size());
      parts.push_back({{"type", "file"},
                       {"file",
                        {{"filename", a.filename},
                         {"file_data", "data:" + a.mime_type + ";base64," + base64_encode(data)}}}});
    }
    parts.push_back({{"type", "text"}, {"text", request.user_text}});
    messages.push_back({{"role", "user"}, {"content", parts}});
  }
  body["messages"] = messages;
  body["max_completion_tokens"] = request.max_output_tokens;
  body["temperature"] = request.temperature;
  return body.dump();
}

CompletionText HttpChatProvider::parse_response(std::string_view body) {
  try {
    auto j = json::parse(body.begin(), body.end());
    const auto& choice = j.at("choices").at(0);
    CompletionText out;
    const auto& content = choice.at("message").at("content");
    out.text = content.is_string() ? content.get<std::string>() : std::string();
    auto reason = choice.value("finish_reason", std::string("stop"));
    out.finish_reason = reason == "stop" ? "complete" : reason;
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      out.usage.prompt_tokens = u->value("prompt_tokens", 0L);
      out.usage.completion_tokens = u->value("completion_tokens", 0L);
    }
    if (out.finish_reason == "complete" && out.text.empty()) {
      throw Error(ErrorCode::kProviderError, "completion finished without text");
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderError, std::string("unparseable provider response: ") + e.what());
  }
}

CompletionText HttpChatProvider::send(const PromptRequest& request) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, url_re)) {
    throw Error(ErrorCode::kProviderError, "malformed endpoint URL: " + config_.url);
  }
  httplib::Client client(m[1].str());
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  client.set_connection_timeout(std::chrono::seconds(30));
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Post(path, headers, request_body(request), "application/json");
  if (!res) {
    throw TransientProviderError("transport failure: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientProviderError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderError,
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  }
  return parse_response(res->body);
}

// ---------------------------------------------------------------------------
// Live gateway

LiveGateway::LiveGateway(std::shared_ptr<Provider> provider, RetryPolicy retry,
                         std::optional<std::filesystem::path> record_to)
    : provider_(std::move(provider)), retry_(std::move(retry)), record_to_(std::move(record_to)) {
  if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (record_to_ && std::filesystem::exists(*record_to_)) {
    calls_ = read_transcript(*record_to_).size();
  }
}

CompletionText LiveGateway::complete(const PromptRequest& request) {
  require(!trim(request.user_text).empty(), "prompt user_text must be non-empty");
  std::lock_guard lock(mu_);
  auto backoff = retry_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      CompletionText out = provider_->send(request);
      if (record_to_) {
        TranscriptEntry entry{calls_, request.role, digest(request), out.text};
        if (record_to_->has_parent_path()) std::filesystem::create_directories(record_to_->parent_path());
        std::ofstream file(*record_to_, std::ios::app | std::ios::binary);
        file << transcript_line(entry);
        if (!file) throw std::runtime_error("cannot append to transcript " + record_to_->string());
      }
      ++calls_;
      return out;
    } catch (const TransientProviderError& e) {
      if (attempt >= retry_.max_retries) {
        throw Error(ErrorCode::kProviderError,
                    std::string(e.what()) + " (after " + std::to_string(attempt) + " retries)");
      }
      retry_.sleep(backoff);
      backoff *= 2;
    }
  }
}

std::size_t LiveGateway::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void LiveGateway::seek(std::size_t consumed) {
  std::lock_guard lock(mu_);
  if (record_to_ && std::filesystem::exists(*record_to_)) {
    auto entries = read_transcript(*record_to_);
    if (entries.size() < consumed) {
      throw Error(ErrorCode::kTranscriptExhausted, "recorded transcript shorter than run ledger");
    }
    std::string kept;
    for (std::size_t i = 0; i < consumed; ++i) kept += transcript_line(entries[i]);
    write_file_atomic(*record_to_, kept);
  }
  calls_ = consumed;
}

// ---------------------------------------------------------------------------
// Replay gateway

ReplayGateway::ReplayGateway(std::vector<TranscriptEntry> entries, bool strict)
    : entries_(std::move(entries)), strict_(strict) {}

ReplayGateway ReplayGateway::from_file(const std::filesystem::path& path, bool strict) {
  return ReplayGateway(read_transcript(path), strict);
}

CompletionText ReplayGateway::complete(const PromptRequest& request) {
  require(!trim(request.user_text).empty(), "prompt user_text must be non-empty");
  std::lock_guard lock(mu_);
  if (next_ >= entries_.size()) {
    throw Error(ErrorCode::kTranscriptExhausted,
                "replay transcript has " + std::to_string(entries_.size()) + " entries; call " +
                    std::to_string(next_ + 1) + " requested");
  }
  const auto& entry = entries_[next_];
  const auto current = digest(request);
  if (entry.request_digest != current) {
    std::string what = "entry " + std::to_string(entry.index) + " (" +
                       std::string(role_name(entry.role)) + "): recorded digest " +
                       entry.request_digest.substr(0, 12) + " != request digest " +
                       current.substr(0, 12);
    if (strict_) throw Error(ErrorCode::kDigestMismatch, what);
    warnings_.push_back({"DigestMismatch", what});
  }
  if (entry.role != request.role) {
    warnings_.push_back({"RoleMismatch", "entry " + std::to_string(entry.index) + " recorded as " +
                                             std::string(role_name(entry.role)) + ", requested " +
                                             std::string(role_name(request.role))});
  }
  ++next_;
  return CompletionText{entry.response_text, "complete", {}};
}

std::size_t ReplayGateway::calls() const {
  std::lock_guard lock(mu_);
  return next_;
}

void ReplayGateway::seek(std::size_t consumed) {
  std::lock_guard lock(mu_);
  if (consumed > entries_.size()) {
    throw Error(ErrorCode::kTranscriptExhausted, "cannot seek past the end of the transcript");
  }
  next_ = consumed;
}

Warnings ReplayGateway::take_warnings() {
  std::lock_guard lock(mu_);
  return std::exchange(warnings_, {});
}

}  // namespace repcheck
