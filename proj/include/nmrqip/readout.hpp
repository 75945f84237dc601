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

#include <utility>
#include <vector>

#include "nmrqip/operators.hpp"

namespace nmrqip {

struct AcquisitionConfig {
    int observe_spin = 0;
    int n_points = 4096;
    double dwell_s = 1e-3;
    double v0 = 1.0;
    double line_broadening_hz = 0.0;
    // Weight of the t = 0 sample in the transform.
    double first_point_scale = 0.5;
};

struct Spectrum {
    std::vector<double> frequencies_hz;
    std::vector<cd> values;
    int observe_spin = 0;
};

// V(t) = -2 V0 tr[e^{-iHt} rho e^{iHt} (i I_x^k + I_y^k)] times exp(-pi lb t).
std::vector<cd> acquire_fid(const Operator& rho, const Operator& h, const AcquisitionConfig& cfg);

Spectrum spectrum(const std::vector<cd>& fid, const AcquisitionConfig& cfg);

// Zero-order phase maximizing the total real (absorptive) signal.
double zero_order_phase(const Spectrum& s);

// Real-part integrals over each [lo, hi) window after zero-order phasing.
std::vector<double> peak_integrals(const Spectrum& s, const std::vector<std::pair<double, double>>& windows);

// Local maxima of |S| above threshold_factor times the median of |S|.
std::vector<double> find_peaks(const Spectrum& s, double threshold_factor = 10.0);

// Weak-coupling line positions of spin k: nu_k + sum_j (+-) J_kj / 2, one per
// state of the other spins, in that spin ordering.
std::vector<double> weak_line_positions(const std::vector<double>& offsets_hz, const Eigen::MatrixXd& j_hz, int k);

double min_line_spacing(std::vector<double> lines);

}  // namespace nmrqip
