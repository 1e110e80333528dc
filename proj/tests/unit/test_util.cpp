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

#include "doctest.h"
#include "repcheck/error.hpp"
#include "repcheck/util.hpp"
#include "test_support.hpp"

using namespace repcheck;

TEST_CASE("sha256 matches the published test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("base64 encodes with padding") {
  auto enc = [](std::string s) {
    return base64_encode({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
}

TEST_CASE("split_lines handles CRLF and a trailing newline") {
  CHECK(split_lines("a\r\nb\n") == std::vector<std::string>{"a", "b"});
  CHECK(split_lines("a\n\nb") == std::vector<std::string>{"a", "", "b"});
  CHECK(split_lines("").size() == 1);
}

TEST_CASE("fenced_blocks finds every block in order") {
  auto blocks = fenced_blocks("intro\n```python\nx = 1\n```\ntext\n~~~\ny = 2\n~~~\n```json\n{\"open\": true}\n");
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].info == "python");
  CHECK(blocks[0].body == "x = 1\n");
  CHECK(blocks[1].info.empty());
  CHECK(blocks[1].body == "y = 2\n");
  CHECK(blocks[2].body == "{\"open\": true}\n");  // unterminated runs to the end
}

TEST_CASE("a tilde fence is not closed by backticks") {
  auto blocks = fenced_blocks("~~~\n```\ninner\n~~~\n");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].body == "```\ninner\n");
}

TEST_CASE("attempt directory names are zero padded") {
  CHECK(attempt_dir_name(1) == "001");
  CHECK(attempt_dir_name(42) == "042");
  CHECK(attempt_dir_name(100) == "100");
}

TEST_CASE("format_number never prints negative zero") {
  CHECK(format_number(-0.0001) == "0.000");
  CHECK(format_number(-0.322) == "-0.322");
  CHECK(format_number(-29, 0) == "-29");
}

TEST_CASE("write_file_atomic replaces content and read_file reports missing paths") {
  repcheck::testing::TempDir dir;
  auto path = dir / "a.txt";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  CHECK(read_file(path) == "two");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  try {
    read_file(dir / "missing.txt");
    FAIL("expected MissingInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingInput);
  }
}

TEST_CASE("Error carries its code name in the message") {
  Error e(ErrorCode::kCorruptLedger, "bad");
  CHECK(std::string(e.what()) == "CorruptLedger: bad");
  CHECK(e.detail() == "bad");
  CHECK_THROWS_AS(require(false, "nope"), Error);
}
