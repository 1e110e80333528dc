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

// Step 1: turn the article and codebook into the structured documents the
// code-generation loop works from.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repcheck/error.hpp"
#include "repcheck/ingest.hpp"
#include "repcheck/llm_gateway.hpp"
#include "repcheck/results.hpp"

namespace repcheck {

enum class TargetKind { kRegressionTable, kFrequencyTable, kFigure };

std::string_view target_kind_name(TargetKind kind);

struct ModelSpec {
  std::string label;
  std::vector<std::string> independent_variables;
};

/// Best-effort structure recovered from the summary's headed sections. The
/// narrative, not the checklist, is what reaches the code-generation prompt.
struct Checklist {
  std::string dependent_variable;
  std::vector<ModelSpec> models;
  std::vector<std::string> transformations;
  std::vector<std::string> sample_restrictions;
  std::vector<std::string> missing_rules;
  // figures
  std::vector<std::string> axes;
  std::vector<std::string> series;
  std::vector<std::string> reference_lines;
  std::vector<std::string> annotations;

  bool empty() const;
};

struct TargetSummary {
  std::string target_id;
  TargetKind kind = TargetKind::kRegressionTable;
  std::string narrative;
  Checklist checklist;
  Warnings warnings;
};

struct VariableMapping {
  std::string concept_label;           // paper concept, e.g. "Education (years)"
  std::string expression;              // text following the concept
  std::vector<std::string> columns;    // dataset identifiers referenced

  bool operator==(const VariableMapping&) const = default;
};

struct InstructionSummary {
  std::string narrative;
  std::vector<VariableMapping> variable_map;
  std::vector<std::string> recodes;
  std::vector<std::string> derived_rules;
  std::vector<std::string> missing_rules;
  Warnings warnings;  // unknown columns etc.; surfaced in the first codegen prompt
};

struct TranscribedReference {
  CanonicalResult result;
  bool repaired = false;
};

// Pure parsers, also used when a run is resumed from persisted documents.
TargetSummary parse_target_summary(std::string target_id, std::string narrative,
                                   std::optional<ResultKind> reference_kind = std::nullopt);
InstructionSummary parse_instruction_summary(std::string narrative,
                                             const std::vector<std::string>& dataset_columns);

/// One gateway call (role summary). The reply is written verbatim to
/// `persist_dir`/summary.md before it is parsed.
TargetSummary summarize_target(Gateway& gateway, const PaperBundle& bundle,
                               std::optional<ResultKind> reference_kind = std::nullopt,
                               const std::optional<std::filesystem::path>& persist_dir = std::nullopt);

/// One gateway call (role instruction). Throws Error(kEmptyMapping) when no
/// concept/column pair can be recovered.
InstructionSummary build_instructions(
    Gateway& gateway, const PaperBundle& bundle, const TargetSummary& summary,
    const std::optional<std::filesystem::path>& persist_dir = std::nullopt);

/// One gateway call (role transcription) plus at most one repair re-prompt.
/// Throws Error(kSchemaViolation) if both replies fail validation.
TranscribedReference transcribe_reference(
    Gateway& gateway, const PaperBundle& bundle,
    const std::optional<std::filesystem::path>& persist_dir = std::nullopt);

// Content of the last ```json (or bare ```) fence, else the trimmed text.
std::string extract_json_block(std::string_view text);

}  // namespace repcheck
