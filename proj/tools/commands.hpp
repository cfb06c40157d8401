// Copyright 2026 The errmargin Authors
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

#ifndef ERRMARGIN_TOOLS_COMMANDS_HPP
#define ERRMARGIN_TOOLS_COMMANDS_HPP

#include <ostream>
#include <string>
#include <vector>

namespace errmargin::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInvalid = 2;

/// Caps the worker threads used by `verify`.
inline constexpr const char *kThreadsEnv = "ERRMARGIN_THREADS";

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace errmargin::cli

#endif  // ERRMARGIN_TOOLS_COMMANDS_HPP
