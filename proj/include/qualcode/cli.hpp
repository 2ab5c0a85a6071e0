// Copyright 2026 The Qualcode Authors
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

#ifndef QUALCODE_CLI_HPP_
#define QUALCODE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "qualcode/config.hpp"

namespace qualcode {

// Exit codes: 0 success, 1 pipeline error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `qualcode` tool. `args` excludes the program name.
// Results go to `out` in stable line formats; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qualcode

#endif  // QUALCODE_CLI_HPP_
