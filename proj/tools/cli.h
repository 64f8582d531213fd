// Copyright 2026 The igedet Authors. All Rights Reserved.
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
//
// `igedet` command line: split, detect, eval, simulate, report.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 model provider error.
#ifndef IGEDET_TOOLS_CLI_H_
#define IGEDET_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace igedet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitProvider = 3;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace igedet::cli

#endif  // IGEDET_TOOLS_CLI_H_
