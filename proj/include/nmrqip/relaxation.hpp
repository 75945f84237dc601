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
#include <limits>
#include <vector>

#include "nmrqip/operators.hpp"

namespace nmrqip {

struct RelaxationModel {
    std::vector<double> t1_s;  // infinity disables
    std::vector<double> t2_s;
    // Equilibrium I_z polarization per spin: p(|0>) = (1 + P)/2. Empty means 0.
    std::vector<double> equilibrium_polarization;

    void validate(int n_spins) const;
    static RelaxationModel uniform(int n_spins, double t1_s, double t2_s);
};

// Trotterized: exp(-i h dt) alternates with per-spin damping; the last step is
// shortened so the total time is exactly t.
StateMatrix evolve_with_relaxation(const StateMatrix& rho, const Operator& h, const RelaxationModel& rm,
                                   double t, double dt);

// One damping step on every spin, in place.
void apply_relaxation_step(Operator& rho, const RelaxationModel& rm, double dt);

// Dense Lindblad generator (column-stacked vec) of the same physics, for checks.
Operator relaxation_lindbladian(const Operator& h, const RelaxationModel& rm);

enum class KickAngleDist { small_gaussian, uniform_0_2pi };
enum class KickTiming { uniform_grid, poisson };
// How the sample average treats kick angles: drawn per kick, or integrated
// analytically (each kick becomes the angle-averaged channel; samples then
// differ only in kick timing).
enum class KickAngleAverage { sampled, exact };

struct KickModel {
    int n_env = 4;
    double omega_sys_hz = 0.0;
    std::vector<double> omega_env_hz;   // defaults to zeros
    std::vector<double> j_sys_env_hz;   // J_1k
    double kick_rate_per_s = 1000.0;
    KickAngleDist angle_dist = KickAngleDist::small_gaussian;
    double sigma_rad = 0.1;
    KickTiming timing = KickTiming::uniform_grid;
    char kick_axis = 'x';
    std::uint64_t seed = 0;
    // Pair sample 2m+1 with sample 2m under negated kick angles (same times).
    bool antithetic = false;
    KickAngleAverage angle_average = KickAngleAverage::sampled;

    void validate() const;
};

struct KickRun {
    std::vector<double> times_s;
    std::vector<cd> single;    // first realization
    std::vector<cd> average;   // mean over samples
    long long total_kicks = 0;
};

// <I_+> of the system spin, sampled at n_times equally spaced points over [0, duration].
KickRun kick_model_run(const KickModel& km, double duration_s, int n_samples, int n_times = 512);

struct DecayFit {
    double rate_per_s = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
    bool good = false;
};

// Least-squares fit of log|y| against t over the leading window where |y| stays
// above floor_fraction of |y(0)|.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double floor_fraction = 0.05);

// Same fit on the monotone upper envelope (reverse running maximum) of |y|.
DecayFit fit_envelope_decay(const std::vector<double>& t, const std::vector<double>& y, double floor_fraction = 0.05);

}  // namespace nmrqip
