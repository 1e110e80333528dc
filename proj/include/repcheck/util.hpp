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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace repcheck {

// Whole-file read; throws Error(kMissingInput) when the path is unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::span<const unsigned char> bytes);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);
std::string replace_all(std::string text, std::string_view from, std::string_view to);

struct FencedBlock {
  std::string info;  // language tag after the opening fence
  std::string body;
};

// Markdown fenced code blocks (``` or ~~~) in order of appearance. An
// unterminated final fence runs to the end of the text.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

// Zero-padded attempt directory name: 1 -> "001".
std::string attempt_dir_name(int index);

// Fixed-point rendering used in reports ("0.322", "-29").
std::string format_number(double value, int decimals = 3);

}  // namespace repcheck
