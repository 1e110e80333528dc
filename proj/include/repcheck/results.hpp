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

// Canonical result documents: the single interchange form shared by the
// analysis harness, model transcriptions and user-supplied references.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace repcheck {

/// One coefficient cell. `stars` counts significance markers:
/// 0 none, 1 p<.05, 2 p<.01, 3 p<.001.
struct Cell {
  std::string variable;
  double estimate = 0.0;
  std::optional<double> se;
  int stars = 0;

  bool operator==(const Cell&) const = default;
};

struct ModelColumn {
  std::string label;
  std::optional<std::int64_t> n;
  std::optional<double> r2;
  std::optional<double> adj_r2;
  std::optional<double> constant;  // unstandardized intercept
  std::vector<Cell> cells;

  bool operator==(const ModelColumn&) const = default;
};

struct RegressionTable {
  std::vector<ModelColumn> models;

  bool operator==(const RegressionTable&) const = default;
};

struct FrequencyRow {
  std::string category;
  std::int64_t count = 0;

  bool operator==(const FrequencyRow&) const = default;
};

struct FrequencyGroup {
  std::string label;
  std::vector<FrequencyRow> rows;
  std::optional<double> mean;

  bool operator==(const FrequencyGroup&) const = default;
};

struct FrequencyTable {
  std::vector<FrequencyGroup> groups;

  bool operator==(const FrequencyTable&) const = default;
};

struct DataSeries {
  std::string label;
  std::vector<double> values;  // aligned with FigureSeries::categories

  bool operator==(const DataSeries&) const = default;
};

struct ReferenceLine {
  std::string label;
  double value = 0.0;

  bool operator==(const ReferenceLine&) const = default;
};

struct FigureSeries {
  std::vector<std::string> categories;
  std::vector<DataSeries> series;
  std::vector<ReferenceLine> reference_lines;

  bool operator==(const FigureSeries&) const = default;
};

enum class ResultKind { kRegressionTable, kFrequencyTable, kFigureSeries };

std::string_view kind_name(ResultKind kind);
std::optional<ResultKind> kind_from_name(std::string_view name);

/// The kind is derived from the payload alternative, so the two can never
/// disagree.
struct CanonicalResult {
  std::variant<RegressionTable, FrequencyTable, FigureSeries> payload;

  ResultKind kind() const { return static_cast<ResultKind>(payload.index()); }

  bool operator==(const CanonicalResult&) const = default;
};

/// Parses and schema-validates a canonical-result document. Star strings
/// ("", "*", "**", "***") and integers 0..3 are both accepted.
/// Throws Error(kSchemaViolation) with a "$.models[0].cells[1].stars" locus.
CanonicalResult parse_result(std::string_view bytes);

/// Stable, indented UTF-8 JSON. parse_result(serialize(r)) == r.
std::string serialize(const CanonicalResult& result);

// Invariant checks shared by the parser and anything that builds results in
// memory. Throws Error(kSchemaViolation).
void validate(const CanonicalResult& result);

/// Label canonicalization for matching generated against published labels:
/// case-fold, trim, strip punctuation, collapse whitespace, then apply the
/// alias table. Idempotent.
class LabelNormalizer {
 public:
  LabelNormalizer();  // ships with the default alias table
  explicit LabelNormalizer(std::map<std::string, std::string> aliases);

  // `from` and `to` are normalized before insertion.
  void add_alias(std::string_view from, std::string_view to);
  std::string operator()(std::string_view label) const;
  const std::map<std::string, std::string>& aliases() const { return aliases_; }

  static const std::map<std::string, std::string>& default_aliases();

 private:
  std::map<std::string, std::string> aliases_;
};

// Case-fold/trim/punctuation step without aliasing.
std::string fold_label(std::string_view label);

std::string normalize_label(std::string_view label);

}  // namespace repcheck
