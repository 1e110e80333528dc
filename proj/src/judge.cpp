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

#include <regex>

#include "repcheck/evaluator.hpp"
#include "repcheck/llm_gateway.hpp"
#include "repcheck/prompts.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

namespace {

std::optional<int> parse_score_opinion(const std::string& text) {
  static const std::regex line(R"((?:^|\n)\s*\**score\**\s*:\s*\**\s*(\d{1,3}))", std::regex::icase);
  std::optional<int> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), line); it != std::sregex_iterator(); ++it) {
    int v = std::stoi((*it)[1].str());
    if (v >= 0 && v <= 100) found = v;
  }
  return found;
}

}  // namespace

JudgeOutcome judge(Gateway& gateway, const CanonicalResult& reference,
                   const CanonicalResult& candidate, const std::vector<std::string>& figure_files) {
  const auto& t = prompt_template("judge.v1.txt");
  PromptRequest req;
  req.role = RoleTag::kJudge;
  req.system_text = t.system_text;
  req.user_text = render(t.user_text, {{"reference", serialize(reference)},
                                       {"candidate", serialize(candidate)}});
  for (const auto& file : figure_files) {
    try {
      req.attachments.push_back(
          {std::filesystem::path(file).filename().string(), "image/png", read_file(file)});
    } catch (const Error&) {
      // unreadable figure: judge the data alone
    }
  }

  JudgeOutcome out;
  try {
    auto reply = gateway.complete(req);
    out.opinion = JudgeOpinion{parse_score_opinion(reply.text), std::move(reply.text)};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kProviderError) throw;
    out.warnings.push_back({"JudgeUnavailable", e.detail()});
  }
  return out;
}

}  // namespace repcheck
