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

// Step 2 prompt assembly and source extraction.

#include <optional>
#include <string>

#include "repcheck/ingest.hpp"
#include "repcheck/llm_gateway.hpp"
#include "repcheck/spec_gen.hpp"

namespace repcheck {

inline constexpr std::string_view kEntrypoint = "run_analysis";
inline constexpr std::string_view kCodegenTemplate = "codegen.v1.txt";

/// A prior attempt as fed back to the model: its code and either its
/// discrepancy report or its error report, already rendered as text.
struct AttemptFeedback {
  int index = 0;
  std::string source;
  std::string report;
  bool errored = false;
  std::optional<int> score;
};

struct AttemptContext {
  int attempt_index = 1;
  std::string target_id;
  const TargetSummary* summary = nullptr;
  const InstructionSummary* instructions = nullptr;
  const DataPreview* preview = nullptr;
  std::size_t row_count = 0;
  std::optional<AttemptFeedback> best;
  std::optional<AttemptFeedback> previous;
};

struct SourceArtifact {
  std::string code_text;
  std::string entrypoint_name{kEntrypoint};
  int attempt_index = 0;
};

// Throws kPreconditionViolation when the context invariants do not hold.
PromptRequest build_codegen_prompt(const AttemptContext& ctx);

/// Last fenced block that mentions the entrypoint, fences stripped. Throws
/// Error(kNoCodeFound).
SourceArtifact extract_code(std::string_view completion, int attempt_index);

}  // namespace repcheck
