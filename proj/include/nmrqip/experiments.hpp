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
#include <map>
#include <string>
#include <vector>

#include "nmrqip/json_io.hpp"

namespace nmrqip {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string render() const;
    std::vector<double> column(const std::string& name) const;
};

struct ExperimentConfig {
    std::string name;
    json params = json::object();  // merged over the experiment's defaults
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    std::string name;
    json summary;
    std::map<std::string, CsvTable> files;  // file name -> table
    json resolved_config;
};

std::vector<std::string> experiment_names();
json experiment_defaults(const std::string& name);

// Validates params against the defaults (unknown keys rejected) and runs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// result.json, config.json and one CSV per table.
void write_result(const ExperimentResult& r, const std::string& out_dir);

ExperimentResult run_grover2(const ExperimentConfig& cfg);
ExperimentResult run_dj2(const ExperimentConfig& cfg);
ExperimentResult run_qho(const ExperimentConfig& cfg);
ExperimentResult run_shor15(const ExperimentConfig& cfg);
ExperimentResult run_bb1_sweep(const ExperimentConfig& cfg);
ExperimentResult run_cp_echo(const ExperimentConfig& cfg);
ExperimentResult run_kick_sweep(const ExperimentConfig& cfg);
ExperimentResult run_mq_growth(const ExperimentConfig& cfg);
ExperimentResult run_spectrum_lines(const ExperimentConfig& cfg);
ExperimentResult run_readout_integrals(const ExperimentConfig& cfg);

// Log-log least-squares slope.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Shor helpers, exposed for tests.
int shor_mul7(int y);  // 7y mod 15 on 1..14, 0 <-> 15
int shor_mul4(int y);  // 4y mod 15 on 1..14, 0 and 15 fixed

}  // namespace nmrqip
