// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// The fairbound command line, callable in-process.

#ifndef FAIRBOUND_TOOLS_CLI_H_
#define FAIRBOUND_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "fairbound/error.h"

namespace fairbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;

int ExitCodeFor(ErrorCode code);

// args excludes the program name. Messages go to `out` and `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// FAIRBOUND_THREADS, or 1 when unset or unparsable.
unsigned ThreadsFromEnv();

}  // namespace fairbound::cli

#endif  // FAIRBOUND_TOOLS_CLI_H_
