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
#include <functional>
#include <vector>

#include "nmrqip/operators.hpp"
#include "nmrqip/program.hpp"
#include "nmrqip/spin_system.hpp"

namespace nmrqip {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

// Minimizes f from x0 with an initial simplex of the given step sizes. Stops when
// the spread of simplex values drops below tol or after max_evals calls.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step, int max_evals,
                             double tol);

struct SmpOptions {
    int restarts = 8;
    int max_evals = 5000;
    double tolerance = 1e-6;
    double min_segment_s = 1e-6;
    double max_segment_s = 0.0;  // 0: derived from the amplitude cap
    double offset_scale_hz = 0.0;  // 0: derived from the amplitude cap
};

struct SmpResult {
    std::vector<PulseSegment> segments;
    double fidelity = 0.0;
    int evaluations = 0;
    std::vector<double> restart_fidelities;
};

// Ensemble-weighted average gate fidelity of a segment list against a target.
double smp_fidelity(const std::vector<PulseSegment>& segs, const Operator& target, const SpinSystem& sys,
                    const EnsembleSpec& ens);

SmpResult smp_optimize(const Operator& target, const SpinSystem& sys, const EnsembleSpec& ens,
                       double max_amplitude_hz, int n_segments, std::uint64_t seed,
                       const SmpOptions& opts = {});

}  // namespace nmrqip
