// include/mvmdd/cli.hpp
//
// Copyright 2026  The mvmdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVMDD_CLI_HPP_
#define MVMDD_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mvmdd::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags, config, data validation
inline constexpr int kExitNumerical = 3;  // non-finite loss
inline constexpr int kExitIo = 4;         // unreadable or malformed files

// Runs the `mvmdd` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a, used for the config hash in scoring reports.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace mvmdd::cli

#endif  // MVMDD_CLI_HPP_
