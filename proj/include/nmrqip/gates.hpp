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

// Delay that realizes exp(-i angle I_z^a I_z^b) on the (a, b) coupling, with the
// offsets of a and b undone by frame rotations and every other spin refocused.
// refocus_spectators=false leaves spectators to evolve freely.
PulseProgram zz_evolution(int a, int b, double angle_rad, const SpinSystem& sys, bool refocus_spectators = true);

PulseProgram compile_cnot(int control, int target, const SpinSystem& sys, bool refocus_spectators = true);

// diag(1, 1, 1, e^{i theta}) on (a, b) up to global phase.
PulseProgram controlled_phase(int a, int b, double theta, const SpinSystem& sys);

// Phase e^{i theta} on the two-spin basis state |bits_a bits_b>, up to global phase.
PulseProgram phase_on_state(int a, int b, int bit_a, int bit_b, double theta, const SpinSystem& sys);

// R_y(pi/2) then R_x(pi): -i H.
PulseProgram hadamard(int k);
PulseProgram not_gate(int k);

// T gate (diag(1, e^{i pi/4})) as a frame rotation, up to phase.
PulseProgram t_gate(int k, bool dagger = false);

PulseProgram toffoli(int c1, int c2, int target, const SpinSystem& sys);
PulseProgram fredkin(int control, int a, int b, const SpinSystem& sys);

// Canonical matrices for checking compiled sequences.
Operator cnot_matrix(int n_spins, int control, int target);
Operator hadamard_matrix(int n_spins, int k);
Operator permutation_matrix(const std::vector<int>& image);  // |i> -> |image[i]>

struct TemporalAveraging {
    std::vector<PulseProgram> programs;
    StateMatrix averaged;
    double alpha = 0.0;  // pseudo-pure weight
};

// Population-cycling programs for 2 or 3 spins and the uniform average of
// their outputs on the given diagonal-dominant input.
TemporalAveraging pseudo_pure_temporal(const SpinSystem& sys, const StateMatrix& rho_thermal);

// alpha for a state of the form alpha |0..0><0..0| + (1-alpha)/d.
double pseudo_pure_alpha(const Operator& rho);

}  // namespace nmrqip
