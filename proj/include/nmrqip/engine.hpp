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

#include <vector>

#include "nmrqip/operators.hpp"
#include "nmrqip/program.hpp"
#include "nmrqip/spin_system.hpp"

namespace nmrqip {

enum class PulseMode { ideal_pulses, finite_pulses };

struct RunOptions {
    PulseMode mode = PulseMode::ideal_pulses;
    // Nutation frequency used when an ideal RotationSpec is played as a finite pulse.
    double finite_amplitude_hz = 25e3;
    bool record_trajectory = false;
    // Applied by run_ensemble per member; left at identity for plain runs.
    double rf_scale = 1.0;
    double b0_offset_hz = 0.0;
};

struct TrajectorySample {
    double time_s = 0.0;
    Operator rho;
};

struct RunResult {
    StateMatrix state;
    Operator unitary;
    std::vector<TrajectorySample> trajectory;  // after every event, when requested
};

RunResult run_program(const PulseProgram& prog, const SpinSystem& sys, const StateMatrix& rho0,
                      const RunOptions& opts = {});

// Total propagator only; skips the state.
Operator program_unitary(const PulseProgram& prog, const SpinSystem& sys, const RunOptions& opts = {});

StateMatrix run_ensemble(const PulseProgram& prog, const SpinSystem& sys, const StateMatrix& rho0,
                         const EnsembleSpec& ens, const RunOptions& opts = {});

// Left-multiply rows of m by a 2x2 acting on spin k.
void apply_local(Operator& m, int n_spins, int k, const Eigen::Matrix2cd& u);
// Left-multiply by a diagonal given as phases.
void apply_diagonal(Operator& m, const Eigen::VectorXcd& d);

Eigen::Matrix2cd frame_z_matrix(double angle_rad);

}  // namespace nmrqip
