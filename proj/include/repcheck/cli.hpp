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

#include <iosfwd>

namespace repcheck {

// Exit codes are part of the command-line contract.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitExhausted = 2;
inline constexpr int kExitAborted = 3;
inline constexpr int kExitUsage = 4;

/// Entry point of the `repcheck` command. Machine-readable results go to
/// `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace repcheck
