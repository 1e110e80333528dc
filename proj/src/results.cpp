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

#include "repcheck/results.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "json.hpp"

#include "repcheck/error.hpp"
#include "repcheck/util.hpp"

namespace repcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view kind_name(ResultKind kind) {
  switch (kind) {
    case ResultKind::kRegressionTable: return "regression_table";
    case ResultKind::kFrequencyTable: return "frequency_table";
    case ResultKind::kFigureSeries: return "figure_series";
  }
  return "unknown";
}

std::optional<ResultKind> kind_from_name(std::string_view name) {
  if (name == "regression_table") return ResultKind::kRegressionTable;
  if (name == "frequency_table") return ResultKind::kFrequencyTable;
  if (name == "figure_series") return ResultKind::kFigureSeries;
  return std::nullopt;
}

namespace {

[[noreturn]] void violation(const std::string& locus, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, locus + ": " + what);
}

std::string at(const std::string& locus, std::string_view key) {
  return locus + "." + std::string(key);
}

std::string at(const std::string& locus, std::size_t index) {
  return locus + "[" + std::to_string(index) + "]";
}

const json& field(const json& obj, std::string_view key, const std::string& locus) {
  auto it = obj.find(key);
  if (it == obj.end()) violation(at(locus, key), "required field missing");
  return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

void expect_object(const json& v, const std::string& locus) {
  if (!v.is_object()) violation(locus, "expected object");
}

const json& array_field(const json& obj, std::string_view key, const std::string& locus) {
  const json& v = field(obj, key, locus);
  if (!v.is_array()) violation(at(locus, key), "expected array");
  return v;
}

std::string string_value(const json& v, const std::string& locus) {
  if (!v.is_string()) violation(locus, "expected string");
  return v.get<std::string>();
}

double number_value(const json& v, const std::string& locus) {
  if (!v.is_number()) violation(locus, "expected number");
  double d = v.get<double>();
  if (!std::isfinite(d)) violation(locus, "non-finite number");
  return d;
}

std::int64_t integer_value(const json& v, const std::string& locus) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  violation(locus, "expected integer");
}

int stars_value(const json& v, const std::string& locus) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.size() <= 3 && s.find_first_not_of('*') == std::string::npos) {
      return static_cast<int>(s.size());
    }
    violation(locus, "star string must be \"\", \"*\", \"**\" or \"***\"");
  }
  if (v.is_number_integer()) {
    auto n = v.get<std::int64_t>();
    if (n >= 0 && n <= 3) return static_cast<int>(n);
  }
  violation(locus, "stars must be 0..3");
}

RegressionTable parse_regression(const json& doc) {
  RegressionTable table;
  const std::string base = "$.models";
  const json& models = array_field(doc, "models", "$");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string locus = at(base, i);
    const json& m = models[i];
    expect_object(m, locus);
    ModelColumn col;
    col.label = string_value(field(m, "label", locus), at(locus, "label"));
    if (auto* v = optional_field(m, "n")) {
      col.n = integer_value(*v, at(locus, "n"));
      if (*col.n < 0) violation(at(locus, "n"), "sample size must be >= 0");
    }
    if (auto* v = optional_field(m, "r2")) col.r2 = number_value(*v, at(locus, "r2"));
    if (auto* v = optional_field(m, "adj_r2")) col.adj_r2 = number_value(*v, at(locus, "adj_r2"));
    if (auto* v = optional_field(m, "constant")) {
      col.constant = number_value(*v, at(locus, "constant"));
    }
    const json& cells = array_field(m, "cells", locus);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string cl = at(at(locus, "cells"), j);
      const json& c = cells[j];
      expect_object(c, cl);
      Cell cell;
      cell.variable = string_value(field(c, "variable", cl), at(cl, "variable"));
      cell.estimate = number_value(field(c, "estimate", cl), at(cl, "estimate"));
      if (auto* v = optional_field(c, "se")) cell.se = number_value(*v, at(cl, "se"));
      if (auto* v = optional_field(c, "stars")) cell.stars = stars_value(*v, at(cl, "stars"));
      col.cells.push_back(std::move(cell));
    }
    table.models.push_back(std::move(col));
  }
  return table;
}

FrequencyTable parse_frequency(const json& doc) {
  FrequencyTable table;
  const json& groups = array_field(doc, "groups", "$");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string locus = at(std::string("$.groups"), i);
    const json& g = groups[i];
    expect_object(g, locus);
    FrequencyGroup group;
    group.label = string_value(field(g, "label", locus), at(locus, "label"));
    if (auto* v = optional_field(g, "mean")) group.mean = number_value(*v, at(locus, "mean"));
    const json& rows = array_field(g, "rows", locus);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::string rl = at(at(locus, "rows"), j);
      expect_object(rows[j], rl);
      FrequencyRow row;
      row.category = string_value(field(rows[j], "category", rl), at(rl, "category"));
      row.count = integer_value(field(rows[j], "count", rl), at(rl, "count"));
      group.rows.push_back(std::move(row));
    }
    table.groups.push_back(std::move(group));
  }
  return table;
}

FigureSeries parse_figure(const json& doc) {
  FigureSeries fig;
  const json& cats = array_field(doc, "categories", "$");
  for (std::size_t i = 0; i < cats.size(); ++i) {
    fig.categories.push_back(string_value(cats[i], at(std::string("$.categories"), i)));
  }
  const json& series = array_field(doc, "series", "$");
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string locus = at(std::string("$.series"), i);
    expect_object(series[i], locus);
    DataSeries s;
    s.label = string_value(field(series[i], "label", locus), at(locus, "label"));
    const json& values = array_field(series[i], "values", locus);
    for (std::size_t j = 0; j < values.size(); ++j) {
      s.values.push_back(number_value(values[j], at(at(locus, "values"), j)));
    }
    fig.series.push_back(std::move(s));
  }
  if (auto* lines = optional_field(doc, "reference_lines")) {
    if (!lines->is_array()) violation("$.reference_lines", "expected array");
    for (std::size_t i = 0; i < lines->size(); ++i) {
      const std::string locus = at(std::string("$.reference_lines"), i);
      expect_object((*lines)[i], locus);
      ReferenceLine line;
      line.label = string_value(field((*lines)[i], "label", locus), at(locus, "label"));
      line.value = number_value(field((*lines)[i], "value", locus), at(locus, "value"));
      fig.reference_lines.push_back(std::move(line));
    }
  }
  return fig;
}

void check_finite(double v, const std::string& locus) {
  if (!std::isfinite(v)) violation(locus, "non-finite number");
}

void validate_regression(const RegressionTable& table) {
  std::set<std::string> labels;
  for (std::size_t i = 0; i < table.models.size(); ++i) {
    const auto& m = table.models[i];
    const std::string locus = at(std::string("$.models"), i);
    if (!labels.insert(m.label).second) violation(at(locus, "label"), "duplicate model label");
    if (m.n && *m.n < 0) violation(at(locus, "n"), "sample size must be >= 0");
    if (m.r2) check_finite(*m.r2, at(locus, "r2"));
    if (m.adj_r2) check_finite(*m.adj_r2, at(locus, "adj_r2"));
    if (m.constant) check_finite(*m.constant, at(locus, "constant"));
    std::set<std::string> vars;
    for (std::size_t j = 0; j < m.cells.size(); ++j) {
      const auto& c = m.cells[j];
      const std::string cl = at(at(locus, "cells"), j);
      if (!vars.insert(c.variable).second) violation(at(cl, "variable"), "duplicate variable");
      check_finite(c.estimate, at(cl, "estimate"));
      if (c.se) check_finite(*c.se, at(cl, "se"));
      if (c.stars < 0 || c.stars > 3) violation(at(cl, "stars"), "stars must be 0..3");
    }
  }
}

void validate_frequency(const FrequencyTable& table) {
  for (std::size_t i = 0; i < table.groups.size(); ++i) {
    const auto& g = table.groups[i];
    const std::string locus = at(std::string("$.groups"), i);
    if (g.mean) check_finite(*g.mean, at(locus, "mean"));
    std::set<std::string> cats;
    for (std::size_t j = 0; j < g.rows.size(); ++j) {
      const std::string rl = at(at(locus, "rows"), j);
      if (!cats.insert(g.rows[j].category).second) {
        violation(at(rl, "category"), "duplicate category");
      }
      if (g.rows[j].count < 0) violation(at(rl, "count"), "count must be >= 0");
    }
  }
}

void validate_figure(const FigureSeries& fig) {
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const std::string locus = at(std::string("$.series"), i);
    if (fig.series[i].values.size() != fig.categories.size()) {
      violation(at(locus, "values"), "series length " + std::to_string(fig.series[i].values.size()) +
                                         " != categories length " +
                                         std::to_string(fig.categories.size()));
    }
    for (std::size_t j = 0; j < fig.series[i].values.size(); ++j) {
      check_finite(fig.series[i].values[j], at(at(locus, "values"), j));
    }
  }
  for (std::size_t i = 0; i < fig.reference_lines.size(); ++i) {
    check_finite(fig.reference_lines[i].value,
                 at(at(std::string("$.reference_lines"), i), "value"));
  }
}

}  // namespace

void validate(const CanonicalResult& result) {
  std::visit(
      [](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, RegressionTable>) validate_regression(payload);
        if constexpr (std::is_same_v<T, FrequencyTable>) validate_frequency(payload);
        if constexpr (std::is_same_v<T, FigureSeries>) validate_figure(payload);
      },
      result.payload);
}

CanonicalResult parse_result(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    violation("$", std::string("invalid JSON (") + e.what() + ")");
  }
  expect_object(doc, "$");
  auto kind_text = string_value(field(doc, "kind", "$"), "$.kind");
  auto kind = kind_from_name(kind_text);
  if (!kind) violation("$.kind", "unknown kind '" + kind_text + "'");

  CanonicalResult result;
  switch (*kind) {
    case ResultKind::kRegressionTable: result.payload = parse_regression(doc); break;
    case ResultKind::kFrequencyTable: result.payload = parse_frequency(doc); break;
    case ResultKind::kFigureSeries: result.payload = parse_figure(doc); break;
  }
  validate(result);
  return result;
}

std::string serialize(const CanonicalResult& result) {
  ordered_json doc;
  doc["kind"] = std::string(kind_name(result.kind()));
  if (const auto* table = std::get_if<RegressionTable>(&result.payload)) {
    doc["models"] = ordered_json::array();
    for (const auto& m : table->models) {
      ordered_json mj;
      mj["label"] = m.label;
      if (m.n) mj["n"] = *m.n;
      if (m.r2) mj["r2"] = *m.r2;
      if (m.adj_r2) mj["adj_r2"] = *m.adj_r2;
      if (m.constant) mj["constant"] = *m.constant;
      mj["cells"] = ordered_json::array();
      for (const auto& c : m.cells) {
        ordered_json cj;
        cj["variable"] = c.variable;
        cj["estimate"] = c.estimate;
        if (c.se) cj["se"] = *c.se;
        cj["stars"] = c.stars;
        mj["cells"].push_back(std::move(cj));
      }
      doc["models"].push_back(std::move(mj));
    }
  } else if (const auto* freq = std::get_if<FrequencyTable>(&result.payload)) {
    doc["groups"] = ordered_json::array();
    for (const auto& g : freq->groups) {
      ordered_json gj;
      gj["label"] = g.label;
      gj["rows"] = ordered_json::array();
      for (const auto& r : g.rows) {
        ordered_json rj;
        rj["category"] = r.category;
        rj["count"] = r.count;
        gj["rows"].push_back(std::move(rj));
      }
      if (g.mean) gj["mean"] = *g.mean;
      doc["groups"].push_back(std::move(gj));
    }
  } else {
    const auto& fig = std::get<FigureSeries>(result.payload);
    doc["categories"] = fig.categories;
    doc["series"] = ordered_json::array();
    for (const auto& s : fig.series) {
      ordered_json sj;
      sj["label"] = s.label;
      sj["values"] = s.values;
      doc["series"].push_back(std::move(sj));
    }
    if (!fig.reference_lines.empty()) {
      doc["reference_lines"] = ordered_json::array();
      for (const auto& l : fig.reference_lines) {
        ordered_json lj;
        lj["label"] = l.label;
        lj["value"] = l.value;
        doc["reference_lines"].push_back(std::move(lj));
      }
    }
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Label normalization

std::string fold_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_space = false;
  for (char raw : label) {
    auto c = static_cast<unsigned char>(raw);
    if (c == '\'') continue;  // "don't" -> "dont"
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;  // whitespace and punctuation both separate words
    }
  }
  return out;
}

const std::map<std::string, std::string>& LabelNormalizer::default_aliases() {
  static const std::map<std::string, std::string> table = {
      {"occ prestige", "occupational prestige"},
      {"prestige", "occupational prestige"},
      {"occupational prestige score", "occupational prestige"},
      {"educ", "education"},
      {"education years", "education"},
      {"years of education", "education"},
      {"income per capita", "household income per capita"},
      {"hh income per capita", "household income per capita"},
      {"income", "household income per capita"},
      {"household income", "household income per capita"},
      {"cons protestant", "conservative protestant"},
      {"conserv prot", "conservative protestant"},
      {"south", "southern"},
      {"other", "other race"},
      {"no religion none", "no religion"},
      {"polintol", "political intolerance"},
      {"political intolerance scale", "political intolerance"},
      {"intercept", "constant"},
      {"const", "constant"},
      {"number of cases", "n"},
      {"sample size", "n"},
      {"r squared", "r2"},
      {"adj r squared", "adj r2"},
  };
  return table;
}

LabelNormalizer::LabelNormalizer() : aliases_(default_aliases()) {}

LabelNormalizer::LabelNormalizer(std::map<std::string, std::string> aliases) {
  for (const auto& [from, to] : aliases) add_alias(from, to);
}

void LabelNormalizer::add_alias(std::string_view from, std::string_view to) {
  auto key = fold_label(from);
  auto target = fold_label(to);
  // Resolve the target through the table so chains collapse to a fixed point.
  if (auto it = aliases_.find(target); it != aliases_.end()) target = it->second;
  if (key == target) return;
  for (auto& [k, v] : aliases_) {
    if (v == key) v = target;
  }
  aliases_[key] = target;
}

std::string LabelNormalizer::operator()(std::string_view label) const {
  auto key = fold_label(label);
  if (auto it = aliases_.find(key); it != aliases_.end()) return it->second;
  return key;
}

std::string normalize_label(std::string_view label) {
  static const LabelNormalizer normalizer;
  return normalizer(label);
}

}  // namespace repcheck
