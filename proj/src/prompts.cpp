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

#include "repcheck/prompts.hpp"

#include <mutex>
#include <stdexcept>

#include "repcheck/util.hpp"

namespace repcheck {

namespace detail {
const std::map<std::string_view, std::string_view>& embedded_prompts();
}  // namespace detail

namespace {

constexpr std::string_view kUserMarker = "=== USER ===\n";

PromptTemplate load(std::string_view name, std::string_view text) {
  PromptTemplate t;
  t.name = std::string(name);
  t.hash = sha256_hex(text);
  auto split = text.find(kUserMarker);
  if (split == std::string_view::npos) {
    t.user_text = std::string(text);
  } else {
    t.system_text = std::string(trim(text.substr(0, split)));
    t.user_text = std::string(text.substr(split + kUserMarker.size()));
  }
  return t;
}

}  // namespace

const PromptTemplate& prompt_template(std::string_view name) {
  static const std::map<std::string, PromptTemplate, std::less<>> templates = [] {
    std::map<std::string, PromptTemplate, std::less<>> out;
    for (const auto& [file, text] : detail::embedded_prompts()) {
      out.emplace(std::string(file), load(file, text));
    }
    return out;
  }();
  auto it = templates.find(name);
  if (it == templates.end()) throw std::out_of_range("unknown prompt template " + std::string(name));
  return it->second;
}

std::string render(std::string_view text, const std::map<std::string, std::string>& vars) {
  // Single pass so substituted values are never re-scanned for placeholders.
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    auto key = std::string(text.substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) {
      out += it->second;
    } else {
      out.append(text.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

std::string_view canonical_schema_text() {
  return R"(Exactly one of three shapes, selected by "kind":

1. {"kind": "regression_table",
    "models": [{"label": "Model 1", "n": 787, "r2": 0.107, "adj_r2": 0.104,
                "constant": 10.92,
                "cells": [{"variable": "Education", "estimate": -0.322,
                           "se": 0.03, "stars": 3}]}]}
   estimate = standardized coefficient; constant = unstandardized intercept;
   stars = 0 (none), 1 (p<.05), 2 (p<.01), 3 (p<.001); n, r2, adj_r2,
   constant and se are optional.
2. {"kind": "frequency_table",
    "groups": [{"label": "Jazz",
                "rows": [{"category": "Like very much", "count": 254}],
                "mean": 2.61}]}
   mean is optional.
3. {"kind": "figure_series",
    "categories": ["Latin", "Jazz"],
    "series": [{"label": "Tolerance coefficient", "values": [-0.42, -0.38]}],
    "reference_lines": [{"label": "Sample mean education", "value": 13.0}]}
   every series has one value per category, in category order.)";
}

}  // namespace repcheck
