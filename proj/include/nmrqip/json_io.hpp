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

#include <string>
#include <vector>

#include <json.hpp>

#include "nmrqip/optimizer.hpp"
#include "nmrqip/program.hpp"
#include "nmrqip/spin_system.hpp"

namespace nmrqip {

using json = nlohmann::json;

json to_json(const SpinSystem& s);
SpinSystem spin_system_from_json(const json& j);

json to_json(const PulseSegment& s);
PulseSegment segment_from_json(const json& j);
json to_json(const std::vector<PulseSegment>& segs);
std::vector<PulseSegment> segments_from_json(const json& j);

json to_json(const PulseProgram& p);
PulseProgram program_from_json(const json& j);

json to_json(const EnsembleSpec& e);
EnsembleSpec ensemble_from_json(const json& j);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Rejects keys outside the allowed list; context names the object in errors.
void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& context);

// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace nmrqip
