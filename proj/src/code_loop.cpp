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

#include "repcheck/code_loop.hpp"

#include "repcheck/prompts.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

namespace {

std::string feedback_block(const AttemptFeedback& fb) {
  std::string out = "## Code (attempt " + std::to_string(fb.index) + ")\n\n```python\n" + fb.source;
  if (!fb.source.empty() && fb.source.back() != '\n') out += '\n';
  out += "```\n\n";
  if (fb.errored) {
    out += "## Error report\n\n" + fb.report;
  } else {
    out += "## Discrepancy report";
    if (fb.score) out += " (alignment score " + std::to_string(*fb.score) + "/100)";
    out += "\n\n" + fb.report;
  }
  if (!out.empty() && out.back() != '\n') out += '\n';
  return out;
}

std::string feedback_sections(const AttemptContext& ctx) {
  if (!ctx.previous) return {};
  std::string out;
  const auto& prev = *ctx.previous;
  if (ctx.best && ctx.best->index == prev.index) {
    out += "\n# BEST ATTEMPT / PREVIOUS ATTEMPT\n";
    out += "The previous attempt is also the best-scoring attempt so far.\n\n";
    out += feedback_block(prev);
  } else {
    if (ctx.best) {
      out += "\n# BEST ATTEMPT\nHighest-scoring code so far and its discrepancy report.\n\n";
      out += feedback_block(*ctx.best);
    }
    out += "\n# PREVIOUS ATTEMPT\n";
    out += prev.errored ? "The previous code failed to run.\n\n"
                        : "The previous code ran; its output still differs from the published result.\n\n";
    out += feedback_block(prev);
  }
  out += "\nRevise the code to remove these discrepancies.\n";
  return out;
}

std::string warning_section(const AttemptContext& ctx) {
  if (ctx.attempt_index != 1 || ctx.instructions->warnings.empty()) return {};
  std::string out = "\n# MAPPING WARNINGS\n";
  for (const auto& w : ctx.instructions->warnings) out += "- " + w.code + ": " + w.message + "\n";
  return out;
}

}  // namespace

PromptRequest build_codegen_prompt(const AttemptContext& ctx) {
  require(ctx.attempt_index >= 1, "attempt index must be >= 1");
  require(ctx.summary && ctx.instructions && ctx.preview, "attempt context is incomplete");
  if (ctx.attempt_index == 1) {
    require(!ctx.best && !ctx.previous, "first attempt cannot carry feedback");
  } else {
    require(ctx.previous.has_value(), "attempt > 1 requires the previous attempt");
  }

  const auto& t = prompt_template(kCodegenTemplate);
  PromptRequest req;
  req.role = RoleTag::kCodegen;
  req.system_text = t.system_text;
  req.user_text = render(t.user_text, {{"entrypoint", std::string(kEntrypoint)},
                                       {"target_id", ctx.target_id},
                                       {"schema", std::string(canonical_schema_text())},
                                       {"summary", ctx.summary->narrative},
                                       {"instructions", ctx.instructions->narrative},
                                       {"preview_rows", std::to_string(ctx.preview->head_rows.size())},
                                       {"row_count", std::to_string(ctx.row_count)},
                                       {"preview", ctx.preview->render()},
                                       {"warnings", warning_section(ctx)},
                                       {"feedback", feedback_sections(ctx)}});
  return req;
}

SourceArtifact extract_code(std::string_view completion, int attempt_index) {
  auto blocks = fenced_blocks(completion);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (it->body.find(kEntrypoint) != std::string::npos && !trim(it->body).empty()) {
      return {std::move(it->body), std::string(kEntrypoint), attempt_index};
    }
  }
  throw Error(ErrorCode::kNoCodeFound,
              blocks.empty() ? "reply contains no fenced code block"
                             : "no fenced code block defines " + std::string(kEntrypoint));
}

}  // namespace repcheck
