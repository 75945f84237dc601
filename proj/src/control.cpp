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

#include "nmrqip/control.hpp"

#include <cmath>

namespace nmrqip {

Eigen::Matrix2cd su2_rotation(const Eigen::Vector3d& axis, double angle) {
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const cd i1(0.0, 1.0);
    Eigen::Matrix2cd m;
    m << cd(c, 0.0) - i1 * s * axis.z(), -i1 * s * axis.x() - s * axis.y(),
        -i1 * s * axis.x() + s * axis.y(), cd(c, 0.0) + i1 * s * axis.z();
    return m;
}

namespace {

Operator embed(const Eigen::Matrix2cd& m, int n_spins, int k) {
    Operator out = Operator::Identity(1, 1);
    for (int j = 0; j < n_spins; ++j) out = kron(out, j == k ? Operator(m) : Operator::Identity(2, 2));
    return out;
}

}  // namespace

Operator rotation_propagator(const RotationSpec& r, int n_spins) {
    const double norm = r.axis.norm();
    if (std::abs(norm - 1.0) > 1e-12) throw ConfigError("rotation axis must be a unit vector");
    const auto m = su2_rotation(r.axis, (1.0 + r.amplitude_error) * r.angle_rad);
    if (r.spin) {
        if (*r.spin < 0 || *r.spin >= n_spins) throw ConfigError("rotation spin out of range");
        return embed(m, n_spins, *r.spin);
    }
    Operator out = Operator::Identity(1, 1);
    for (int j = 0; j < n_spins; ++j) out = kron(out, Operator(m));
    return out;
}

CompositeSequence bb1(double theta_rad, std::optional<int> spin) {
    if (!(theta_rad > 0.0) || theta_rad > kTwoPi + 1e-12) throw ConfigError("bb1 needs 0 < theta <= 2 pi");
    const double phi = std::acos(-theta_rad / (4.0 * kPi));
    CompositeSequence seq;
    seq.rotations.push_back(RotationSpec::in_plane(0.0, theta_rad, spin));
    seq.rotations.push_back(RotationSpec::in_plane(phi, kPi, spin));
    seq.rotations.push_back(RotationSpec::in_plane(3.0 * phi, kTwoPi, spin));
    seq.rotations.push_back(RotationSpec::in_plane(phi, kPi, spin));
    return seq;
}

Operator composite_propagator(const CompositeSequence& seq, int n_spins, double amplitude_error) {
    Operator u = identity_op(n_spins);
    for (auto r : seq.rotations) {
        r.amplitude_error = amplitude_error;
        u = rotation_propagator(r, n_spins) * u;
    }
    return u;
}

Operator rf_hamiltonian(const PulseSegment& seg, int n_spins) {
    const Eigen::Index dim = Eigen::Index{1} << n_spins;
    Operator h = Operator::Zero(dim, dim);
    const double w1 = kTwoPi * seg.amplitude_hz;
    const double cphi = std::cos(seg.phase_rad), sphi = std::sin(seg.phase_rad);
    auto add = [&](int k) {
        if (w1 != 0.0) h += w1 * (cphi * spin_operator(n_spins, k, Axis::x) + sphi * spin_operator(n_spins, k, Axis::y));
        if (seg.transmitter_offset_hz != 0.0)
            h -= kTwoPi * seg.transmitter_offset_hz * spin_operator(n_spins, k, Axis::z);
    };
    if (seg.targets.empty()) {
        for (int k = 0; k < n_spins; ++k) add(k);
    } else {
        for (int k : seg.targets) add(k);
    }
    return h;
}

Operator segment_propagator(const PulseSegment& seg, const Operator& h_int) {
    const int n = spins_for_dim(h_int.rows());
    return expm_hermitian(h_int + rf_hamiltonian(seg, n), seg.duration_s);
}

Operator segment_propagator(const PulseSegment& seg, const SpinSystem& sys) {
    return segment_propagator(seg, internal_hamiltonian(sys));
}

TogglingFrame toggling_frame(const Operator& h_int, const CompositeSequence& pulses, double delta_t_s) {
    const int n = spins_for_dim(h_int.rows());
    TogglingFrame out;
    Operator u = identity_op(n);
    if (pulses.rotations.empty()) {
        out.toggled.push_back(h_int);
    } else {
        for (const auto& r : pulses.rotations) {
            out.toggled.push_back(u.adjoint() * h_int * u);
            u = rotation_propagator(r, n) * u;
        }
    }
    // Cyclic means U_M = e^{i phi} 1.
    const cd phase = u(0, 0);
    if (std::abs(std::abs(phase) - 1.0) > 1e-8 ||
        (u - phase * identity_op(n)).cwiseAbs().maxCoeff() > 1e-8)
        throw ConfigError("toggling_frame: pulse train is not cyclic");
    out.frame = u;
    out.total = identity_op(n);
    out.average = Operator::Zero(h_int.rows(), h_int.cols());
    for (const auto& hk : out.toggled) {
        out.total = expm_hermitian(hk, delta_t_s) * out.total;
        out.average += hk;
    }
    out.average /= static_cast<double>(out.toggled.size());
    return out;
}

PulseProgram carr_purcell(double tau_s, int n_echoes) {
    if (n_echoes < 1) throw ConfigError("carr_purcell needs at least one echo");
    if (!(tau_s > 0.0)) throw ConfigError("carr_purcell needs tau > 0");
    PulseProgram p;
    p.delay(tau_s);
    for (int k = 0; k < n_echoes; ++k) {
        p.rotate(RotationSpec::about('x', kPi));
        p.delay(k + 1 < n_echoes ? 2.0 * tau_s : tau_s);
    }
    return p;
}

CompositeSequence carr_purcell_train(int n_echoes) {
    if (n_echoes < 1) throw ConfigError("carr_purcell needs at least one echo");
    CompositeSequence seq;
    for (int k = 0; k < n_echoes; ++k) {
        seq.rotations.push_back(RotationSpec::about('x', kPi));
        seq.rotations.push_back(RotationSpec::about('x', 0.0));
    }
    // An odd echo count leaves the frame at pi_x; a final pi_x closes it.
    if (n_echoes % 2 == 1) seq.rotations.back() = RotationSpec::about('x', kPi);
    return seq;
}

std::vector<PulseSegment> shaped_pulse(PulseShape shape, double flip_angle_rad, double duration_s,
                                       int n_segments, double phase_rad, std::vector<int> targets) {
    if (n_segments < 1 || !(duration_s > 0.0)) throw ConfigError("shaped pulse needs segments and duration");
    std::vector<double> env(n_segments);
    for (int i = 0; i < n_segments; ++i) {
        // Segment midpoints on [-1, 1].
        const double x = -1.0 + (2.0 * i + 1.0) / n_segments;
        switch (shape) {
        case PulseShape::rectangular: env[i] = 1.0; break;
        case PulseShape::gaussian: env[i] = std::exp(-0.5 * (x / 0.4) * (x / 0.4)); break;
        case PulseShape::hermite_gaussian: {
            const double u = x * 2.5;
            env[i] = (1.0 - 0.667 * u * u) * std::exp(-u * u);
            break;
        }
        }
    }
    double area = 0.0;
    for (double e : env) area += e;
    const double dt = duration_s / n_segments;
    // Signed envelopes become a phase flip on the negative lobes.
    const double scale = flip_angle_rad / (kTwoPi * dt * area);
    std::vector<PulseSegment> segs;
    for (double e : env) {
        PulseSegment s;
        s.amplitude_hz = std::abs(scale * e);
        s.phase_rad = (scale * e < 0.0) ? phase_rad + kPi : phase_rad;
        s.duration_s = dt;
        s.targets = targets;
        segs.push_back(s);
    }
    return segs;
}

}  // namespace nmrqip
