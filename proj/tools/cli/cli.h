//
// Copyright 2026 The dpkit Authors
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
//

// Entry point of the dpkit command-line tool, callable in-process.

#ifndef DPKIT_TOOLS_CLI_CLI_H_
#define DPKIT_TOOLS_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "dpkit/audit.h"

namespace dpkit::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitViolation = 1,
  kExitUsage = 2,
  kExitInconclusive = 3,
};

int ExitCodeFor(Verdict verdict);

// `args` excludes the program name. Reports go to `out` unless --out is
// given; diagnostics go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dpkit::cli

#endif  // DPKIT_TOOLS_CLI_CLI_H_
