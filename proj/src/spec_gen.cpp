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

#include "repcheck/spec_gen.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include "repcheck/prompts.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

std::string_view target_kind_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::kRegressionTable: return "regression_table";
    case TargetKind::kFrequencyTable: return "frequency_table";
    case TargetKind::kFigure: return "figure";
  }
  return "unknown";
}

bool Checklist::empty() const {
  return dependent_variable.empty() && models.empty() && transformations.empty() &&
         sample_restrictions.empty() && missing_rules.empty() && axes.empty() && series.empty() &&
         reference_lines.empty() && annotations.empty();
}

namespace {

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

bool contains_any(std::string_view haystack, std::initializer_list<std::string_view> needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](std::string_view n) { return contains(haystack, n); });
}

void push_unique(std::vector<std::string>& items, std::string value) {
  if (value.empty()) return;
  if (std::find(items.begin(), items.end(), value) == items.end()) items.push_back(std::move(value));
}

// Strips list markers and markdown emphasis.
std::string clean_line(std::string_view line) {
  static const std::regex marker(R"(^\s*(?:[-*+]|\d+[.)])\s+)");
  std::string s = std::regex_replace(std::string(line), marker, "", std::regex_constants::format_first_only);
  s = replace_all(std::move(s), "**", "");
  s = replace_all(std::move(s), "`", "");
  auto t = trim(s);
  while (!t.empty() && (t.front() == '*' || t.front() == '_')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == '*' || t.back() == '_')) t.remove_suffix(1);
  return std::string(trim(t));
}

bool is_list_item(std::string_view line) {
  static const std::regex item(R"(^\s*(?:[-*+]|\d+[.)])\s+.*)");
  return std::regex_match(line.begin(), line.end(), item);
}

bool is_numbered_item(std::string_view line) {
  static const std::regex item(R"(^\s*\d+[.)]\s+.*)");
  return std::regex_match(line.begin(), line.end(), item);
}

std::optional<std::string> heading_title(std::string_view line) {
  static const std::regex heading(R"(^\s{0,3}#{1,6}\s+(.*?)\s*#*\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_match(line.begin(), line.end(), m, heading)) return clean_line(m[1].str());
  return std::nullopt;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') depth = std::max(0, depth - 1);
    if (c == ',' && depth == 0) {
      push_unique(out, std::string(trim(item)));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  push_unique(out, std::string(trim(item)));
  return out;
}

// "All Model 2 variables + Political intolerance" expands to the IVs of
// model 2 followed by the extra terms.
std::vector<std::string> expand_ivs(const std::vector<std::string>& items,
                                    const std::vector<ModelSpec>& models) {
  static const std::regex all_re(R"(^all\s+(model\s*\d+)\s+variables\s*(?:\+\s*(.*))?$)",
                                 std::regex::icase);
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::smatch m;
    if (std::regex_match(item, m, all_re)) {
      const auto wanted = fold_label(m[1].str());
      for (const auto& model : models) {
        if (fold_label(model.label).starts_with(wanted)) {
          for (const auto& iv : model.independent_variables) push_unique(out, iv);
        }
      }
      if (m[2].matched) {
        for (auto& extra : split_list(m[2].str())) push_unique(out, std::move(extra));
      }
    } else {
      push_unique(out, item);
    }
  }
  return out;
}

}  // namespace

TargetSummary parse_target_summary(std::string target_id, std::string narrative,
                                   std::optional<ResultKind> reference_kind) {
  static const std::regex model_heading(R"(\bmodel\s*\d+\b)", std::regex::icase);
  static const std::regex iv_line(R"(^(?:ivs?|independent variables?)\s*:\s*(.*)$)", std::regex::icase);
  static const std::regex dv_line(R"(^(?:dv|dependent variable)\s*:\s*(.*)$)", std::regex::icase);

  TargetSummary summary;
  summary.target_id = std::move(target_id);
  summary.narrative = std::move(narrative);

  const auto lowered = to_lower(summary.narrative);
  if (reference_kind) {
    summary.kind = *reference_kind == ResultKind::kFigureSeries    ? TargetKind::kFigure
                   : *reference_kind == ResultKind::kFrequencyTable ? TargetKind::kFrequencyTable
                                                                    : TargetKind::kRegressionTable;
  } else if (to_lower(summary.target_id).starts_with("fig")) {
    summary.kind = TargetKind::kFigure;
  } else if (contains(lowered, "frequency") && !contains(lowered, "regression")) {
    summary.kind = TargetKind::kFrequencyTable;
  }

  auto& cl = summary.checklist;
  std::string section;  // lowercased current heading
  bool headed = false;
  bool in_dv_section = false;
  bool series_list = false;
  ModelSpec* model = nullptr;

  for (const auto& raw : split_lines(summary.narrative)) {
    if (auto title = heading_title(raw)) {
      headed = true;
      section = to_lower(*title);
      in_dv_section = contains_any(section, {"dependent variable", "outcome"});
      series_list = false;
      model = nullptr;
      if (std::regex_search(*title, model_heading)) {
        cl.models.push_back({*title, {}});
        model = &cl.models.back();
      }
      continue;
    }
    if (trim(raw).empty()) continue;
    const std::string line = clean_line(raw);
    const std::string low = to_lower(line);
    std::smatch m;

    if (std::regex_match(line, m, dv_line)) {
      if (cl.dependent_variable.empty()) cl.dependent_variable = std::string(trim(m[1].str()));
    } else if (in_dv_section && cl.dependent_variable.empty()) {
      cl.dependent_variable = line;
    }
    if (model && std::regex_match(line, m, iv_line)) {
      model->independent_variables = expand_ivs(split_list(m[1].str()), cl.models);
    }

    const bool item = is_list_item(raw);
    if (series_list && is_numbered_item(raw)) {
      push_unique(cl.series, line);
      continue;
    }
    series_list = contains(low, "series") && !is_numbered_item(raw);
    if (!item) continue;

    if (contains_any(section, {"sample", "data source"}) ||
        contains_any(low, {"restrict", "sample:", "filter"})) {
      push_unique(cl.sample_restrictions, line);
    }
    if (contains_any(section, {"missing"}) ||
        contains_any(low, {"missing", "don't know", "dont know", "listwise"})) {
      push_unique(cl.missing_rules, line);
    }
    if (contains_any(section, {"transform"}) ||
        contains_any(low, {"standardiz", "index", "recode", "log("})) {
      push_unique(cl.transformations, line);
    }
    if (contains(low, "axis")) push_unique(cl.axes, line);
    if (contains(low, "reference line") ||
        (contains_any(low, {"horizontal", "vertical"}) && contains(low, "line"))) {
      push_unique(cl.reference_lines, line);
    }
    if (contains_any(low, {"annotation", "arrow"})) push_unique(cl.annotations, line);
  }

  if (!headed) {
    summary.checklist = Checklist{};
    summary.warnings.push_back(
        {"UnparseableSummary", "summary has no headed sections; narrative kept, checklist empty"});
  } else if (cl.empty()) {
    summary.warnings.push_back({"UnparseableSummary", "no checklist items recognized"});
  }
  return summary;
}

InstructionSummary parse_instruction_summary(std::string narrative,
                                             const std::vector<std::string>& dataset_columns) {
  static const std::regex bold_item(R"(^\s*(?:[-*+]|\d+[.)])\s*\*\*(.+?)\*\*\s*:?\s*(.*)$)");
  static const std::regex backtick(R"(`([^`]+)`)");
  static const std::regex ident(R"([A-Za-z_][A-Za-z0-9_]*)");
  static const std::regex plain_item(R"(^\s*(?:[-*+]|\d+[.)])\s*`([A-Za-z_][A-Za-z0-9_]*)`\s*(.*)$)");

  InstructionSummary out;
  out.narrative = std::move(narrative);

  auto identifiers = [&](const std::string& text) {
    std::vector<std::string> cols;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), backtick);
         it != std::sregex_iterator(); ++it) {
      const std::string inner = (*it)[1].str();
      for (auto id = std::sregex_iterator(inner.begin(), inner.end(), ident);
           id != std::sregex_iterator(); ++id) {
        push_unique(cols, id->str());
      }
    }
    return cols;
  };
  auto add_mapping = [&](std::string concept_label, std::string expression,
                         std::vector<std::string> cols) {
    if (cols.empty()) return;
    auto t = trim(concept_label);
    while (!t.empty() && t.back() == ':') t.remove_suffix(1);
    out.variable_map.push_back({std::string(trim(t)), std::string(trim(expression)), std::move(cols)});
  };

  for (const auto& raw : split_lines(out.narrative)) {
    std::smatch m;
    if (std::regex_match(raw, m, bold_item)) {
      add_mapping(m[1].str(), m[2].str(), identifiers(m[2].str()));
    } else if (trim(raw).starts_with("|")) {
      std::vector<std::string> cells;
      std::string_view row = trim(raw);
      row.remove_prefix(1);
      if (row.ends_with("|")) row.remove_suffix(1);
      std::size_t start = 0;
      while (start <= row.size()) {
        auto bar = row.find('|', start);
        if (bar == std::string_view::npos) bar = row.size();
        cells.emplace_back(trim(row.substr(start, bar - start)));
        start = bar + 1;
      }
      std::string concept_label;
      std::vector<std::string> cols;
      std::string expression;
      for (const auto& cell : cells) {
        if (cell.find('`') != std::string::npos) {
          for (auto& c : identifiers(cell)) push_unique(cols, std::move(c));
          if (expression.empty()) expression = cell;
        } else if (concept_label.empty() && cell.find_first_not_of("-: ") != std::string::npos) {
          concept_label = cell;
        }
      }
      if (!concept_label.empty()) add_mapping(concept_label, expression, std::move(cols));
    } else if (std::regex_match(raw, m, plain_item)) {
      std::string rest(trim(m[2].str()));
      std::string concept_label = m[1].str();
      if (rest.size() > 2 && rest.front() == '(' && rest.back() == ')') {
        concept_label = rest.substr(1, rest.size() - 2);
      }
      add_mapping(concept_label, "`" + m[1].str() + "` " + rest, {m[1].str()});
    }

    if (!is_list_item(raw)) continue;
    const std::string line = clean_line(raw);
    const std::string low = to_lower(line);
    if (contains_any(low, {"missing", "don't know", "dont know", " dk", "listwise", "exclude"})) {
      push_unique(out.missing_rules, line);
    }
    if (contains_any(low, {"recode", "coded", "= 1 if", "== ", "= 0 if"})) {
      push_unique(out.recodes, line);
    }
    if (contains_any(low, {"sum", "index", "scale", "construct", "derived", "count"})) {
      push_unique(out.derived_rules, line);
    }
  }

  const std::set<std::string> known(dataset_columns.begin(), dataset_columns.end());
  std::set<std::string> reported;
  for (const auto& mapping : out.variable_map) {
    for (const auto& col : mapping.columns) {
      if (known.contains(col) || !reported.insert(col).second) continue;
      std::string hint;
      for (const auto& k : known) {
        if (to_lower(k) == to_lower(col)) hint = " (dataset has " + k + ")";
      }
      out.warnings.push_back({"UnknownColumn", "\"" + mapping.concept_label + "\" maps to " + col +
                                                   ", which is not a dataset column" + hint});
    }
  }
  return out;
}

std::string extract_json_block(std::string_view text) {
  auto blocks = fenced_blocks(text);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (to_lower(it->info) == "json") return it->body;
  }
  if (!blocks.empty()) return blocks.back().body;
  return std::string(trim(text));
}

namespace {

std::vector<Attachment> paper_attachments(const PaperBundle& bundle) {
  if (!bundle.paper_bytes) return {};
  return {Attachment{"paper.pdf", "application/pdf", *bundle.paper_bytes}};
}

void persist(const std::optional<std::filesystem::path>& dir, const char* name,
             std::string_view text) {
  if (dir) write_file_atomic(*dir / name, text);
}

}  // namespace

TargetSummary summarize_target(Gateway& gateway, const PaperBundle& bundle,
                               std::optional<ResultKind> reference_kind,
                               const std::optional<std::filesystem::path>& persist_dir) {
  const auto& t = prompt_template("summary.v1.txt");
  PromptRequest req;
  req.role = RoleTag::kSummary;
  req.system_text = t.system_text;
  req.user_text = render(t.user_text, {{"target_id", bundle.target_id}, {"paper_text", bundle.paper_text}});
  req.attachments = paper_attachments(bundle);
  auto reply = gateway.complete(req);
  persist(persist_dir, "summary.md", reply.text);
  return parse_target_summary(bundle.target_id, std::move(reply.text), reference_kind);
}

InstructionSummary build_instructions(Gateway& gateway, const PaperBundle& bundle,
                                      const TargetSummary& summary,
                                      const std::optional<std::filesystem::path>& persist_dir) {
  const auto& t = prompt_template("instruction.v1.txt");
  std::string columns;
  for (const auto& c : bundle.dataset.columns) columns += (columns.empty() ? "" : ", ") + c;
  PromptRequest req;
  req.role = RoleTag::kInstruction;
  req.system_text = t.system_text;
  req.user_text = render(t.user_text, {{"target_id", bundle.target_id},
                                       {"summary", summary.narrative},
                                       {"columns", columns},
                                       {"codebook", serialize_codebook(bundle.codebook)}});
  auto reply = gateway.complete(req);
  persist(persist_dir, "instructions.md", reply.text);
  auto out = parse_instruction_summary(std::move(reply.text), bundle.dataset.columns);
  if (out.variable_map.empty()) {
    throw Error(ErrorCode::kEmptyMapping, "instruction summary maps no concepts to dataset columns");
  }
  return out;
}

TranscribedReference transcribe_reference(Gateway& gateway, const PaperBundle& bundle,
                                          const std::optional<std::filesystem::path>& persist_dir) {
  const auto& t = prompt_template("transcription.v1.txt");
  PromptRequest req;
  req.role = RoleTag::kTranscription;
  req.system_text = t.system_text;
  req.user_text = render(t.user_text, {{"target_id", bundle.target_id},
                                       {"schema", std::string(canonical_schema_text())},
                                       {"paper_text", bundle.paper_text}});
  req.attachments = paper_attachments(bundle);
  auto reply = gateway.complete(req);
  persist(persist_dir, "reference.raw.txt", reply.text);
  try {
    return {parse_result(extract_json_block(reply.text)), false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaViolation) throw;
    const auto& r = prompt_template("transcription_repair.v1.txt");
    PromptRequest repair;
    repair.role = RoleTag::kTranscription;
    repair.system_text = r.system_text;
    repair.user_text = render(r.user_text, {{"target_id", bundle.target_id},
                                            {"error", e.detail()},
                                            {"previous", reply.text},
                                            {"schema", std::string(canonical_schema_text())}});
    auto second = gateway.complete(repair);
    persist(persist_dir, "reference.repair.raw.txt", second.text);
    return {parse_result(extract_json_block(second.text)), true};
  }
}

}  // namespace repcheck
