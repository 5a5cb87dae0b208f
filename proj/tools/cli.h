// Copyright 2026 The FLIP Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLIP_TOOLS_CLI_H_
#define FLIP_TOOLS_CLI_H_

#include <iosfwd>

namespace flip::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Dispatches `flip <subcommand> ...`. Results go to `out`; errors go to
// `err` as one JSON object per line.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace flip::cli

#endif  // FLIP_TOOLS_CLI_H_
