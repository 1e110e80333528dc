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

#include "repcheck/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "repcheck/util.hpp"

namespace repcheck {

// ---------------------------------------------------------------------------
// Codebook

bool is_missing_label(std::string_view label) {
  static const std::array<std::string_view, 8> phrases = {
      "dont know", "no answer", "refused", "not applicable", "na", "dk", "iap", "n a"};
  const auto folded = fold_label(label);
  for (auto phrase : phrases) {
    if (folded == phrase) return true;
    // Multi-word phrases also match as a prefix: "dont know much about it".
    if (phrase.find(' ') != std::string_view::npos && phrase != "n a" &&
        folded.starts_with(std::string(phrase) + " ")) {
      return true;
    }
  }
  return false;
}

const VariableDoc* Codebook::find(std::string_view name) const {
  const auto key = to_lower(name);
  for (const auto& v : variables) {
    if (!v.name.empty() && to_lower(v.name) == key) return &v;
  }
  return nullptr;
}

namespace {

const std::regex& pair_re() {
  static const std::regex re(R"((-?\d+)\s*=\s*([^,;]+))");
  return re;
}

const std::regex& code_line_re() {
  static const std::regex re(R"(^\s*(-?\d+)[.)]?\s+([^=\s].*)$)");
  return re;
}

const std::regex& missing_line_re() {
  static const std::regex re(R"(^\s*missing(?:\s+codes)?\s*:\s*(.*)$)", std::regex::icase);
  return re;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string trim_separators(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.back() == ';' || s.back() == ',')) {
    s.remove_suffix(1);
    s = trim(s);
  }
  return std::string(s);
}

// Strips a leading "—", "–", "--", "-" or ":" separator.
bool strip_separator(std::string_view& rest) {
  for (std::string_view sep : {"—", "–", "--", "-", ":"}) {
    if (rest.starts_with(sep)) {
      rest.remove_prefix(sep.size());
      rest = trim(rest);
      return true;
    }
  }
  return false;
}

void append_description(std::string& description, std::string_view text) {
  auto t = trim_separators(text);
  if (t.empty()) return;
  if (!description.empty()) description += ' ';
  description += t;
}

// Collects "code=label" pairs; returns the text preceding the first pair.
std::string collect_pairs(const std::string& text, std::map<std::int64_t, std::string>& labels) {
  std::string prefix = text;
  bool first = true;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pair_re());
       it != std::sregex_iterator(); ++it) {
    if (first) {
      prefix = text.substr(0, static_cast<std::size_t>(it->position()));
      first = false;
    }
    labels.emplace(std::stoll((*it)[1].str()), std::string(trim((*it)[2].str())));
  }
  return prefix;
}

std::vector<std::int64_t> parse_code_list(const std::string& text) {
  static const std::regex int_re(R"(-?\d+)");
  std::set<std::int64_t> codes;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), int_re);
       it != std::sregex_iterator(); ++it) {
    codes.insert(std::stoll(it->str()));
  }
  return {codes.begin(), codes.end()};
}

VariableDoc parse_block(const std::vector<std::string>& lines, Warnings& warnings) {
  VariableDoc doc;
  std::string_view first = trim(lines.front());
  auto space = first.find_first_of(" \t");
  std::string_view token = first.substr(0, space);
  std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(first.substr(space));
  bool colon = token.size() > 1 && token.back() == ':';
  if (colon) token.remove_suffix(1);
  bool separated = strip_separator(rest);

  if (!is_identifier(token) || !(colon || separated || rest.empty())) {
    for (const auto& line : lines) append_description(doc.description, line);
    warnings.push_back({"UnparseableBlock", "kept as description only: \"" +
                                                doc.description.substr(0, 60) + "\""});
    return doc;
  }

  doc.name = std::string(token);
  std::optional<std::vector<std::int64_t>> explicit_missing;
  append_description(doc.description, collect_pairs(std::string(rest), doc.value_labels));
  std::smatch m;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (std::regex_match(line, m, missing_line_re())) {
      explicit_missing = to_lower(trim(m[1].str())) == "none" ? std::vector<std::int64_t>{}
                                                                : parse_code_list(m[1].str());
    } else if (std::regex_match(line, m, code_line_re())) {
      doc.value_labels.emplace(std::stoll(m[1].str()), std::string(trim(m[2].str())));
    } else if (std::regex_search(line, pair_re())) {
      collect_pairs(line, doc.value_labels);
    } else {
      append_description(doc.description, line);
    }
  }

  if (explicit_missing) {
    doc.missing_codes = *explicit_missing;
  } else {
    for (const auto& [code, label] : doc.value_labels) {
      if (is_missing_label(label)) doc.missing_codes.push_back(code);
    }
  }
  for (auto code : doc.missing_codes) {
    auto it = doc.value_labels.find(code);
    if (it != doc.value_labels.end() && !is_missing_label(it->second)) {
      warnings.push_back({"MissingCodeOverlap", doc.name + ": missing code " + std::to_string(code) +
                                                    " is labelled \"" + it->second + "\""});
    }
  }
  return doc;
}

}  // namespace

Codebook parse_codebook(std::string_view text) {
  if (trim(text).empty()) throw Error(ErrorCode::kEmptyCodebook, "codebook has no content");
  Codebook book;
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  for (auto& line : split_lines(text)) {
    if (trim(line).empty()) {
      if (!current.empty()) blocks.push_back(std::exchange(current, {}));
    } else {
      current.push_back(std::move(line));
    }
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  std::set<std::string> seen;
  for (const auto& block : blocks) {
    auto doc = parse_block(block, book.warnings);
    if (!doc.name.empty() && !seen.insert(to_lower(doc.name)).second) {
      book.warnings.push_back({"DuplicateVariable", doc.name + " defined more than once; first kept"});
      continue;
    }
    book.variables.push_back(std::move(doc));
  }
  return book;
}

std::string serialize_codebook(const Codebook& codebook) {
  std::ostringstream out;
  bool first = true;
  for (const auto& v : codebook.variables) {
    if (!first) out << "\n";
    first = false;
    if (v.name.empty()) {
      out << v.description << "\n";
      continue;
    }
    out << v.name << " —";
    if (!v.description.empty()) out << " " << v.description;
    out << "\n";
    for (const auto& [code, label] : v.value_labels) out << "  " << code << "  " << label << "\n";
    out << "missing: ";
    if (v.missing_codes.empty()) {
      out << "none";
    } else {
      for (std::size_t i = 0; i < v.missing_codes.size(); ++i) {
        out << (i ? ", " : "") << v.missing_codes[i];
      }
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Dataset

bool CsvReader::next_row(std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (;;) {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (in_quotes) {
        throw Error(ErrorCode::kMalformedDataset,
                    "unterminated quoted field at line " + std::to_string(line_ + 1));
      }
      if (!any) return false;
      fields.push_back(std::move(field));
      ++line_;
      return true;
    }
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(static_cast<char>(c));
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::exchange(field, {}));
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in_.peek() == '\n') in_.get();
      fields.push_back(std::move(field));
      ++line_;
      return true;
    } else {
      field.push_back(static_cast<char>(c));
    }
  }
}

namespace {

bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && trim(row.front()).empty();
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  return "\"" + replace_all(value, "\"", "\"\"") + "\"";
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingInput, "cannot read " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingInput, "cannot open " + path.string());
  return in;
}

std::vector<std::string> read_header(CsvReader& reader, const std::filesystem::path& path) {
  std::vector<std::string> header;
  while (reader.next_row(header)) {
    if (!blank_row(header)) break;
  }
  if (header.empty() || blank_row(header)) {
    throw Error(ErrorCode::kMalformedDataset, path.string() + ": no header row");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]).empty()) {
      throw Error(ErrorCode::kMalformedDataset,
                  path.string() + ": empty column name at position " + std::to_string(i + 1));
    }
    if (!seen.insert(header[i]).second) {
      throw Error(ErrorCode::kMalformedDataset, path.string() + ": duplicate column " + header[i]);
    }
  }
  return header;
}

}  // namespace

std::string DataPreview::render() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\n";
  };
  line(columns);
  for (const auto& row : head_rows) line(row);
  return out.str();
}

DatasetHandle open_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  CsvReader reader(in);
  DatasetHandle handle;
  handle.path = path;
  handle.columns = read_header(reader, path);
  std::vector<std::string> row;
  while (reader.next_row(row)) {
    if (blank_row(row)) continue;
    if (row.size() != handle.columns.size()) {
      throw Error(ErrorCode::kMalformedDataset,
                  path.string() + ": line " + std::to_string(reader.line()) + " has " +
                      std::to_string(row.size()) + " fields, header has " +
                      std::to_string(handle.columns.size()));
    }
    ++handle.row_count;
  }
  return handle;
}

DataPreview preview_dataset(const DatasetHandle& handle, std::size_t k) {
  require(k >= 1, "preview depth k must be >= 1");
  auto in = open_input(handle.path);
  CsvReader reader(in);
  DataPreview preview;
  preview.columns = read_header(reader, handle.path);
  std::vector<std::string> row;
  while (preview.head_rows.size() < k && reader.next_row(row)) {
    if (blank_row(row)) continue;
    if (row.size() != preview.columns.size()) {
      throw Error(ErrorCode::kMalformedDataset,
                  handle.path.string() + ": line " + std::to_string(reader.line()) +
                      " does not match the header");
    }
    preview.head_rows.push_back(row);
  }
  preview.k = preview.head_rows.size();
  return preview;
}

// ---------------------------------------------------------------------------
// Bundle

PaperBundle load_bundle(const std::filesystem::path& paper_path,
                        const std::filesystem::path& codebook_path,
                        const std::filesystem::path& data_path, std::string_view target_id,
                        const std::optional<std::filesystem::path>& paper_document) {
  require(!trim(target_id).empty(), "target_id must be non-empty");
  PaperBundle bundle;
  bundle.target_id = std::string(trim(target_id));
  bundle.paper_text = read_file(paper_path);
  if (bundle.paper_text.find('\0') != std::string::npos || bundle.paper_text.starts_with("%PDF")) {
    throw Error(ErrorCode::kEmptyPaper,
                paper_path.string() + " is a binary document; supply extracted text");
  }
  if (trim(bundle.paper_text).empty()) {
    throw Error(ErrorCode::kEmptyPaper, paper_path.string() + " contains no text");
  }
  if (paper_document) bundle.paper_bytes = read_file(*paper_document);
  bundle.codebook = parse_codebook(read_file(codebook_path));
  bundle.dataset = open_dataset(data_path);
  return bundle;
}

CanonicalResult load_reference(const std::filesystem::path& path) {
  return parse_result(read_file(path));
}

}  // namespace repcheck
