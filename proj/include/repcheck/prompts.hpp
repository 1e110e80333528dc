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

// Versioned prompt templates, embedded into the library at build time from
// the files under prompts/. A template holds a system part and a user part
// separated by a "=== USER ===" line; "{{name}}" placeholders are filled by
// render().

#include <map>
#include <string>
#include <string_view>

namespace repcheck {

struct PromptTemplate {
  std::string name;  // file name, e.g. "codegen.v1.txt"
  std::string system_text;
  std::string user_text;
  std::string hash;  // sha256 of the template file
};

// Throws std::out_of_range for unknown names.
const PromptTemplate& prompt_template(std::string_view name);

std::string render(std::string_view text, const std::map<std::string, std::string>& vars);

// Human-readable description of the canonical-result document, shared by the
// transcription and code-generation prompts.
std::string_view canonical_schema_text();

}  // namespace repcheck
