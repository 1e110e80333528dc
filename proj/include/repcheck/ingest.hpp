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

// Loading and validation of the run inputs: article text, codebook, dataset
// and an optional user-supplied reference result.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repcheck/error.hpp"
#include "repcheck/results.hpp"

namespace repcheck {

struct VariableDoc {
  std::string name;  // empty for description-only entries
  std::string description;
  std::map<std::int64_t, std::string> value_labels;
  std::vector<std::int64_t> missing_codes;  // sorted, unique

  bool operator==(const VariableDoc&) const = default;
};

struct Codebook {
  std::vector<VariableDoc> variables;
  Warnings warnings;

  const VariableDoc* find(std::string_view name) const;  // case-insensitive
};

/// Blank-line separated blocks; the first token of a block names the
/// variable. Value labels are written "98=DK" (comma/semicolon separated) or
/// one per line as "8  Don't know". A "missing: 8, 9" line overrides the
/// automatic detection of missing codes from their labels. Blocks that do not
/// start with a variable name are kept as description-only entries.
/// Throws Error(kEmptyCodebook).
Codebook parse_codebook(std::string_view text);

// Canonical text form; parse_codebook(serialize_codebook(c)) reproduces c.
std::string serialize_codebook(const Codebook& codebook);

// True for labels such as "Don't know", "NA", "Refused".
bool is_missing_label(std::string_view label);

/// Minimal RFC 4180 reader: comma separated, double-quote escaping, CRLF or
/// LF line ends. Fields are returned verbatim.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}
  // False at end of input.
  bool next_row(std::vector<std::string>& fields);
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

struct DatasetHandle {
  std::filesystem::path path;
  std::string format = "csv";
  std::vector<std::string> columns;
  std::size_t row_count = 0;

  bool operator==(const DatasetHandle&) const = default;
};

struct DataPreview {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> head_rows;
  std::size_t k = 0;

  // Rendered as comma-separated text for prompts.
  std::string render() const;
};

// Parses the header and validates every row. Throws kMissingInput or
// kMalformedDataset.
DatasetHandle open_dataset(const std::filesystem::path& path);

DataPreview preview_dataset(const DatasetHandle& handle, std::size_t k = 5);

struct PaperBundle {
  std::string paper_text;
  std::optional<std::string> paper_bytes;  // raw document, forwarded as-is
  Codebook codebook;
  DatasetHandle dataset;
  std::string target_id;
};

PaperBundle load_bundle(const std::filesystem::path& paper_path,
                        const std::filesystem::path& codebook_path,
                        const std::filesystem::path& data_path, std::string_view target_id,
                        const std::optional<std::filesystem::path>& paper_document = std::nullopt);

CanonicalResult load_reference(const std::filesystem::path& path);

}  // namespace repcheck
