// Copyright 2026 The cpsched Authors
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

#ifndef CPSCHED_CLI_HPP
#define CPSCHED_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cpsched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnsat = 20;
inline constexpr int kExitTimeout = 30;

/// Runs one command line (args excludes the program name). Reports go to
/// out, diagnostics to err. Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace cpsched::cli

#endif // CPSCHED_CLI_HPP
