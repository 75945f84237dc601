// Copyright 2026 The nmrqip Authors
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nmrqip {

struct CliInvocation {
    std::string subcommand;  // run | simulate | optimize-pulse | spectrum | list
    std::string name;        // experiment name for run
    std::string config_path;
    std::vector<std::string> overrides;  // key=value, dotted keys address nested objects
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    unsigned threads = 0;  // 0: NMRSIM_THREADS or machine parallelism
};

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int dispatch(const CliInvocation& inv);

// Parses argv and dispatches.
int run_cli(int argc, char** argv);

}  // namespace nmrqip
