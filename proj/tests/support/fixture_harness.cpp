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

// Stand-in for the analysis harness. Instead of running the generated code it
// obeys a "# harness: <directive> [file]" comment inside it, replaying
// pre-recorded harness outputs. Invocation matches the real harness:
//   fixture_harness <code_path> <data_path> <output_path>

#include <signal.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

void sleep_forever() {
  for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: fixture_harness <code_path> <data_path> <output_path>\n";
    return 2;
  }
  const fs::path code = argv[1], data = argv[2], output = argv[3];
  const fs::path fixtures = REPCHECK_FIXTURE_DIR;
  if (!fs::exists(data)) {
    std::cerr << "FileNotFoundError: " << data << "\n";
    return 2;
  }

  static const std::regex directive(R"(#\s*harness:\s*([a-z-]+)(?:\s+(\S+))?)");
  const std::string source = slurp(code);
  std::smatch m;
  if (!std::regex_search(source, m, directive)) {
    nlohmann::json doc = {{"exception_type", "ContractViolation"},
                          {"message", "fixture code carries no harness directive"},
                          {"traceback", ""},
                          {"context", {{"columns", nlohmann::json::array()}, {"shape", {0, 0}}}}};
    spit(output, doc.dump(2));
    return 1;
  }
  const std::string verb = m[1].str();
  const std::string arg = m[2].matched ? m[2].str() : std::string{};

  if (verb == "result") {
    spit(output, slurp(fixtures / arg));
    std::cout << "run_analysis finished\n";
    return 0;
  }
  if (verb == "figure") {
    // A tiny PNG signature is enough for the figure plumbing.
    spit("figure.png", std::string("\x89PNG\r\n\x1a\n", 8));
    spit(output, slurp(fixtures / arg));
    return 0;
  }
  if (verb == "error") {
    const auto doc = slurp(fixtures / arg);
    spit(output, doc);
    auto j = nlohmann::json::parse(doc);
    std::cerr << j.value("traceback", std::string{});
    return 1;
  }
  if (verb == "garbage") {
    spit(output, "this is not json");
    return 0;
  }
  if (verb == "crash") {
    std::cerr << "Fatal Python error: Segmentation fault\n\nCurrent thread 0x00007f (most recent call first):\n"
                 "  File \"code.src\", line 3 in run_analysis\n";
    return 3;
  }
  if (verb == "hang") sleep_forever();
  if (verb == "hang-ignore-term") {
    signal(SIGTERM, SIG_IGN);
    sleep_forever();
  }
  if (verb == "spew") {
    std::string chunk(64 * 1024, 'x');
    for (;;) std::fwrite(chunk.data(), 1, chunk.size(), stdout);
  }
  std::cerr << "unknown directive " << verb << "\n";
  return 2;
}
