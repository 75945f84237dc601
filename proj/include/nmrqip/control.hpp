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

// 2x2 exp(-i angle n.sigma/2).
Eigen::Matrix2cd su2_rotation(const Eigen::Vector3d& axis, double angle);

Operator rotation_propagator(const RotationSpec& r, int n_spins);

// BB1 for target angle theta about x on one spin, in time order:
// R_x(theta), R_phi(pi), R_3phi(2pi), R_phi(pi) with phi = acos(-theta/(4 pi)).
CompositeSequence bb1(double theta_rad, std::optional<int> spin = 0);

// Product of the sequence's propagators with a common amplitude error.
Operator composite_propagator(const CompositeSequence& seq, int n_spins, double amplitude_error = 0.0);

Operator rf_hamiltonian(const PulseSegment& seg, int n_spins);
Operator segment_propagator(const PulseSegment& seg, const SpinSystem& sys);
// Same, reusing a precomputed internal Hamiltonian.
Operator segment_propagator(const PulseSegment& seg, const Operator& h_int);

struct TogglingFrame {
    std::vector<Operator> toggled;  // H_k = U_k^dagger H U_k, one per interval
    Operator total;                 // product of exp(-i H_k dt), later intervals on the left
    Operator average;               // zeroth-order average Hamiltonian
    Operator frame;                 // U_M, the train's net pulse product
};

// The train is [dt, P_1, dt, P_2, ..., dt, P_M]. Requires U_M = P_M...P_1 to be
// the identity up to phase (1e-8). An empty train is a single free interval.
TogglingFrame toggling_frame(const Operator& h_int, const CompositeSequence& pulses, double delta_t_s);

// [tau, pi_x, 2 tau, pi_x, ..., pi_x, tau] with n_echoes pi pulses on all spins.
PulseProgram carr_purcell(double tau_s, int n_echoes);

// The same train as a toggling-frame pulse list on uniform spacing tau: pi pulses
// separated by zero-angle placeholders.
CompositeSequence carr_purcell_train(int n_echoes);

enum class PulseShape { rectangular, gaussian, hermite_gaussian };

// Discretize a shaped pulse of the given flip angle into equal-length segments.
std::vector<PulseSegment> shaped_pulse(PulseShape shape, double flip_angle_rad, double duration_s,
                                       int n_segments, double phase_rad = 0.0,
                                       std::vector<int> targets = {});

}  // namespace nmrqip
