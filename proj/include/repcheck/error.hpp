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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repcheck {

enum class ErrorCode {
  kPreconditionViolation,
  kMissingInput,
  kEmptyPaper,
  kMalformedDataset,
  kEmptyCodebook,
  kSchemaViolation,
  kProviderError,
  kTranscriptExhausted,
  kDigestMismatch,
  kEmptyMapping,
  kNoCodeFound,
  kSpawnFailure,
  kCorruptLedger,
  kCancelled,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure surfaced by the library. The code is what callers branch on;
/// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Non-fatal findings (duplicate codebook entries, unknown columns, ...).
struct Warning {
  std::string code;
  std::string message;

  bool operator==(const Warning&) const = default;
};

using Warnings = std::vector<Warning>;

inline void require(bool condition, const char* what) {
  if (!condition) throw Error(ErrorCode::kPreconditionViolation, what);
}

}  // namespace repcheck
