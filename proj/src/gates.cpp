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

#include "nmrqip/gates.hpp"

#include <bit>
#include <cmath>

#include "nmrqip/engine.hpp"

namespace nmrqip {

namespace {

void require_weak(const SpinSystem& sys) {
    if (sys.model != CouplingModel::weak_j)
        throw ConfigError("gate compilation requires the weak_j coupling model");
}

void require_spin(const SpinSystem& sys, int k) {
    if (k < 0 || k >= sys.n_spins()) throw ConfigError("gate spin index out of range");
}

}  // namespace

PulseProgram zz_evolution(int a, int b, double angle_rad, const SpinSystem& sys, bool refocus_spectators) {
    require_weak(sys);
    require_spin(sys, a);
    require_spin(sys, b);
    if (a == b) throw ConfigError("zz evolution needs two distinct spins");
    const double j = sys.j_hz(a, b);
    if (j == 0.0) throw ConfigError("zero coupling between spins " + std::to_string(a) + " and " + std::to_string(b));
    // exp(-i 2 pi J t I_z I_z) has period 2/|J| up to global phase.
    const double period = 2.0 / std::abs(j);
    double t = std::fmod(angle_rad / (kTwoPi * j), period);
    if (t < 0.0) t += period;
    PulseProgram p;
    if (t < 1e-15) return p;

    std::vector<int> spectators;
    for (int k = 0; k < sys.n_spins(); ++k)
        if (k != a && k != b) spectators.push_back(k);

    if (!refocus_spectators || spectators.empty()) {
        p.delay(t);
    } else {
        // Spectator s follows sign row (s+1) of a Sylvester-Hadamard pattern over
        // L slots; distinct rows are balanced and mutually orthogonal, so every
        // coupling touching a spectator and every spectator offset averages out.
        int slots = 2;
        while (slots <= static_cast<int>(spectators.size())) slots *= 2;
        auto sign = [](int w, int i) { return (std::popcount(static_cast<unsigned>(w & i)) & 1) ? -1 : 1; };
        const double dt = t / slots;
        for (int i = 0; i < slots; ++i) {
            if (i > 0)
                for (std::size_t s = 0; s < spectators.size(); ++s)
                    if (sign(static_cast<int>(s) + 1, i) != sign(static_cast<int>(s) + 1, i - 1))
                        p.rotate(RotationSpec::about('x', kPi, spectators[s]));
            p.delay(dt);
        }
        for (std::size_t s = 0; s < spectators.size(); ++s)
            if (sign(static_cast<int>(s) + 1, slots - 1) < 0) p.rotate(RotationSpec::about('x', kPi, spectators[s]));
    }
    p.frame_z(a, -kTwoPi * sys.offsets_hz[a] * t);
    p.frame_z(b, -kTwoPi * sys.offsets_hz[b] * t);
    return p;
}

PulseProgram compile_cnot(int control, int target, const SpinSystem& sys, bool refocus_spectators) {
    if (control == target) throw ConfigError("cnot control and target must differ");
    PulseProgram p;
    p.rotate(RotationSpec::about('y', kPi / 2.0, target));
    p.append(zz_evolution(control, target, kPi, sys, refocus_spectators));
    p.frame_z(control, kPi / 2.0);
    p.frame_z(target, -kPi / 2.0);
    p.rotate(RotationSpec::about('y', -kPi / 2.0, target));
    return p;
}

PulseProgram phase_on_state(int a, int b, int bit_a, int bit_b, double theta, const SpinSystem& sys) {
    // [q = bit] = 1/2 - s m with s = +1 for bit 1, -1 for bit 0 (m = I_z eigenvalue).
    const double sa = bit_a ? 1.0 : -1.0, sb = bit_b ? 1.0 : -1.0;
    PulseProgram p;
    p.append(zz_evolution(a, b, -theta * sa * sb, sys));
    p.frame_z(a, sa * theta / 2.0);
    p.frame_z(b, sb * theta / 2.0);
    return p;
}

PulseProgram controlled_phase(int a, int b, double theta, const SpinSystem& sys) {
    return phase_on_state(a, b, 1, 1, theta, sys);
}

PulseProgram hadamard(int k) {
    PulseProgram p;
    p.rotate(RotationSpec::about('y', kPi / 2.0, k));
    p.rotate(RotationSpec::about('x', kPi, k));
    return p;
}

PulseProgram not_gate(int k) {
    PulseProgram p;
    p.rotate(RotationSpec::about('x', kPi, k));
    return p;
}

PulseProgram t_gate(int k, bool dagger) {
    PulseProgram p;
    p.frame_z(k, dagger ? -kPi / 4.0 : kPi / 4.0);
    return p;
}

PulseProgram toffoli(int c1, int c2, int target, const SpinSystem& sys) {
    PulseProgram p;
    p.append(hadamard(target));
    p.append(compile_cnot(c2, target, sys));
    p.append(t_gate(target, true));
    p.append(compile_cnot(c1, target, sys));
    p.append(t_gate(target));
    p.append(compile_cnot(c2, target, sys));
    p.append(t_gate(target, true));
    p.append(compile_cnot(c1, target, sys));
    p.append(t_gate(c2));
    p.append(t_gate(target));
    p.append(hadamard(target));
    p.append(compile_cnot(c1, c2, sys));
    p.append(t_gate(c1));
    p.append(t_gate(c2, true));
    p.append(compile_cnot(c1, c2, sys));
    return p;
}

PulseProgram fredkin(int control, int a, int b, const SpinSystem& sys) {
    PulseProgram p;
    p.append(compile_cnot(b, a, sys));
    p.append(toffoli(control, a, b, sys));
    p.append(compile_cnot(b, a, sys));
    return p;
}

Operator cnot_matrix(int n_spins, int control, int target) {
    const int dim = 1 << n_spins;
    std::vector<int> image(dim);
    const int cb = 1 << (n_spins - 1 - control), tb = 1 << (n_spins - 1 - target);
    for (int i = 0; i < dim; ++i) image[i] = (i & cb) ? (i ^ tb) : i;
    return permutation_matrix(image);
}

Operator hadamard_matrix(int n_spins, int k) {
    Operator h(2, 2);
    const double s = std::sqrt(0.5);
    h << s, s, s, -s;
    Operator out = Operator::Identity(1, 1);
    for (int j = 0; j < n_spins; ++j) out = kron(out, j == k ? h : Operator::Identity(2, 2));
    return out;
}

Operator permutation_matrix(const std::vector<int>& image) {
    const auto dim = static_cast<Eigen::Index>(image.size());
    Operator p = Operator::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) p(image[i], i) = 1.0;
    return p;
}

double pseudo_pure_alpha(const Operator& rho) {
    const Eigen::Index d = rho.rows();
    double rest = 0.0;
    for (Eigen::Index i = 1; i < d; ++i) rest += rho(i, i).real();
    rest /= static_cast<double>(d - 1);
    return rho(0, 0).real() - rest;
}

TemporalAveraging pseudo_pure_temporal(const SpinSystem& sys, const StateMatrix& rho_thermal) {
    const int n = sys.n_spins();
    if (n < 2 || n > 3) throw ConfigError("temporal averaging is implemented for 2 or 3 spins only");
    TemporalAveraging out;
    if (n == 2) {
        PulseProgram p1, p2;
        p1.append(compile_cnot(0, 1, sys)).append(compile_cnot(1, 0, sys));
        p2.append(compile_cnot(1, 0, sys)).append(compile_cnot(0, 1, sys));
        out.programs = {PulseProgram{}, p1, p2};
    } else {
        // M = CNOT(2->0) CNOT(1->2) CNOT(0->1) is a GF(2) map of order 7 that
        // cycles all nonzero basis states; its powers 0..6 are the programs.
        PulseProgram m;
        m.append(compile_cnot(0, 1, sys)).append(compile_cnot(1, 2, sys)).append(compile_cnot(2, 0, sys));
        PulseProgram acc;
        for (int k = 0; k < 7; ++k) {
            out.programs.push_back(acc);
            acc.append(m);
        }
    }
    out.averaged.rho = Operator::Zero(sys.dim(), sys.dim());
    out.averaged.purity = rho_thermal.purity;
    for (const auto& p : out.programs) out.averaged.rho += run_program(p, sys, rho_thermal).state.rho;
    out.averaged.rho /= static_cast<double>(out.programs.size());
    out.alpha = pseudo_pure_alpha(out.averaged.rho);
    return out;
}

}  // namespace nmrqip
