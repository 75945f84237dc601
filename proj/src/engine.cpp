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

#include "nmrqip/engine.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "nmrqip/control.hpp"
#include "nmrqip/parallel.hpp"

namespace nmrqip {

void apply_local(Operator& m, int n_spins, int k, const Eigen::Matrix2cd& u) {
    const Eigen::Index bit = Eigen::Index{1} << (n_spins - 1 - k);
    const Eigen::Index dim = m.rows();
    for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
        if (r0 & bit) continue;
        const Eigen::Index r1 = r0 | bit;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const cd a = m(r0, c), b = m(r1, c);
            m(r0, c) = u(0, 0) * a + u(0, 1) * b;
            m(r1, c) = u(1, 0) * a + u(1, 1) * b;
        }
    }
}

void apply_diagonal(Operator& m, const Eigen::VectorXcd& d) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) *= d(r);
}

Eigen::Matrix2cd frame_z_matrix(double angle_rad) {
    Eigen::Matrix2cd z = Eigen::Matrix2cd::Zero();
    z(0, 0) = std::polar(1.0, -angle_rad / 2.0);
    z(1, 1) = std::polar(1.0, angle_rad / 2.0);
    return z;
}

namespace {

SpinSystem shifted(const SpinSystem& sys, double b0_offset_hz) {
    if (b0_offset_hz == 0.0) return sys;
    SpinSystem s = sys;
    for (auto& v : s.offsets_hz) v += b0_offset_hz;
    return s;
}

// Walks a program, left-multiplying each event's propagator into a target.
class Stepper {
public:
    Stepper(const SpinSystem& sys, const RunOptions& opts)
        : n_(sys.n_spins()), opts_(opts), h_int_(internal_hamiltonian(shifted(sys, opts.b0_offset_hz))),
          evolver_(h_int_) {}

    // Returns elapsed time of the event.
    double apply(const ProgramEvent& ev, Operator& u) {
        if (const auto* d = std::get_if<DelayEvent>(&ev)) {
            delay(d->duration_s, u);
            return d->duration_s;
        }
        if (const auto* f = std::get_if<FrameZEvent>(&ev)) {
            apply_local(u, n_, f->spin, frame_z_matrix(f->angle_rad));
            return 0.0;
        }
        const auto& p = std::get<PulseEvent>(ev).pulse;
        if (const auto* s = std::get_if<PulseSegment>(&p)) {
            PulseSegment seg = *s;
            seg.amplitude_hz *= opts_.rf_scale;
            u = segment_propagator(seg, h_int_) * u;
            return seg.duration_s;
        }
        RotationSpec r = std::get<RotationSpec>(p);
        const bool z_only = std::abs(r.axis.z()) > 1.0 - 1e-12;
        if (!z_only) r.amplitude_error = (1.0 + r.amplitude_error) * opts_.rf_scale - 1.0;
        if (opts_.mode == PulseMode::ideal_pulses || z_only || r.angle_rad == 0.0) {
            const auto m = su2_rotation(r.axis, (1.0 + r.amplitude_error) * r.angle_rad);
            if (r.spin) {
                apply_local(u, n_, *r.spin, m);
            } else {
                for (int k = 0; k < n_; ++k) apply_local(u, n_, k, m);
            }
            return 0.0;
        }
        if (std::abs(r.axis.z()) > 1e-12)
            throw ConfigError("finite pulses need an axis in the transverse plane");
        // Played as a rectangular pulse on the targeted channel.
        PulseSegment seg;
        seg.amplitude_hz = opts_.finite_amplitude_hz * (1.0 + r.amplitude_error);
        seg.phase_rad = std::atan2(r.axis.y(), r.axis.x()) + (r.angle_rad < 0.0 ? kPi : 0.0);
        seg.duration_s = std::abs(r.angle_rad) / (kTwoPi * opts_.finite_amplitude_hz);
        if (r.spin) seg.targets = {*r.spin};
        const auto key = std::make_tuple(seg.amplitude_hz, seg.phase_rad, seg.duration_s, r.spin.value_or(-1));
        auto it = pulse_cache_.find(key);
        if (it == pulse_cache_.end()) it = pulse_cache_.emplace(key, segment_propagator(seg, h_int_)).first;
        u = it->second * u;
        return seg.duration_s;
    }

private:
    void delay(double t, Operator& u) {
        if (evolver_.diagonal()) {
            Eigen::VectorXcd ph(evolver_.eigenvalues().size());
            for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, -evolver_.eigenvalues()(i) * t);
            apply_diagonal(u, ph);
            return;
        }
        u = evolver_.propagator(t) * u;
    }

    int n_;
    RunOptions opts_;
    Operator h_int_;
    HermitianEvolver evolver_;
    std::map<std::tuple<double, double, double, int>, Operator> pulse_cache_;
};

}  // namespace

Operator program_unitary(const PulseProgram& prog, const SpinSystem& sys, const RunOptions& opts) {
    sys.validate();
    prog.validate(sys.n_spins());
    Stepper st(sys, opts);
    Operator u = identity_op(sys.n_spins());
    for (const auto& ev : prog.events) st.apply(ev, u);
    return u;
}

RunResult run_program(const PulseProgram& prog, const SpinSystem& sys, const StateMatrix& rho0,
                      const RunOptions& opts) {
    sys.validate();
    if (rho0.rho.rows() != sys.dim() || rho0.rho.cols() != sys.dim())
        throw ConfigError("initial state dimension does not match the spin system");
    prog.validate(sys.n_spins());
    RunResult res;
    Stepper st(sys, opts);
    Operator u = identity_op(sys.n_spins());
    double t = 0.0;
    for (const auto& ev : prog.events) {
        t += st.apply(ev, u);
        if (opts.record_trajectory) res.trajectory.push_back({t, u * rho0.rho * u.adjoint()});
    }
    res.unitary = u;
    res.state.rho = u * rho0.rho * u.adjoint();
    res.state.purity = rho0.purity;
    return res;
}

StateMatrix run_ensemble(const PulseProgram& prog, const SpinSystem& sys, const StateMatrix& rho0,
                         const EnsembleSpec& ens, const RunOptions& opts) {
    ens.validate();
    const std::function<Operator(std::size_t)> member = [&](std::size_t i) {
        RunOptions o = opts;
        o.record_trajectory = false;
        o.rf_scale = opts.rf_scale * ens.members[i].rf_scale;
        o.b0_offset_hz = opts.b0_offset_hz + ens.members[i].b0_offset_hz;
        return run_program(prog, sys, rho0, o).state.rho;
    };
    const auto states = parallel_map<Operator>(ens.members.size(), member);
    StateMatrix out;
    out.purity = rho0.purity;
    out.rho = Operator::Zero(sys.dim(), sys.dim());
    for (std::size_t i = 0; i < states.size(); ++i) out.rho += ens.members[i].weight * states[i];
    return out;
}

}  // namespace nmrqip
