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

#include "nmrqip/program.hpp"

#include <cmath>
#include <string>

#include "nmrqip/operators.hpp"

namespace nmrqip {

RotationSpec RotationSpec::about(char axis, double angle, std::optional<int> spin) {
    RotationSpec r;
    switch (axis) {
    case 'x': r.axis = Eigen::Vector3d::UnitX(); break;
    case 'y': r.axis = Eigen::Vector3d::UnitY(); break;
    case 'z': r.axis = Eigen::Vector3d::UnitZ(); break;
    default: throw ConfigError(std::string("unknown rotation axis '") + axis + "'");
    }
    r.angle_rad = angle;
    r.spin = spin;
    return r;
}

RotationSpec RotationSpec::in_plane(double phase_rad, double angle, std::optional<int> spin) {
    RotationSpec r;
    r.axis = Eigen::Vector3d(std::cos(phase_rad), std::sin(phase_rad), 0.0);
    r.angle_rad = angle;
    r.spin = spin;
    return r;
}

PulseProgram& PulseProgram::rotate(const RotationSpec& r) {
    events.push_back(PulseEvent{r});
    return *this;
}

PulseProgram& PulseProgram::segment(const PulseSegment& s) {
    events.push_back(PulseEvent{s});
    return *this;
}

PulseProgram& PulseProgram::delay(double seconds) {
    if (seconds < 0.0 || !std::isfinite(seconds)) throw ConfigError("delay duration must be non-negative");
    if (seconds > 0.0) events.push_back(DelayEvent{seconds});
    return *this;
}

PulseProgram& PulseProgram::frame_z(int spin, double angle_rad) {
    if (angle_rad != 0.0) events.push_back(FrameZEvent{spin, angle_rad});
    return *this;
}

PulseProgram& PulseProgram::append(const PulseProgram& other) {
    events.insert(events.end(), other.events.begin(), other.events.end());
    return *this;
}

double PulseProgram::total_duration(double finite_amplitude_hz) const {
    double t = 0.0;
    for (const auto& ev : events) {
        if (const auto* d = std::get_if<DelayEvent>(&ev)) {
            t += d->duration_s;
        } else if (const auto* p = std::get_if<PulseEvent>(&ev)) {
            if (const auto* s = std::get_if<PulseSegment>(&p->pulse))
                t += s->duration_s;
            else if (finite_amplitude_hz > 0.0)
                t += std::abs(std::get<RotationSpec>(p->pulse).angle_rad) / (kTwoPi * finite_amplitude_hz);
        }
    }
    return t;
}

void PulseProgram::validate(int n_spins) const {
    auto check_spin = [&](int k) {
        if (k < 0 || k >= n_spins)
            throw ConfigError("program references spin " + std::to_string(k) + " of " + std::to_string(n_spins));
    };
    for (const auto& ev : events) {
        if (const auto* d = std::get_if<DelayEvent>(&ev)) {
            if (!(d->duration_s > 0.0)) throw ConfigError("delay duration must be positive");
        } else if (const auto* f = std::get_if<FrameZEvent>(&ev)) {
            check_spin(f->spin);
        } else {
            const auto& p = std::get<PulseEvent>(ev).pulse;
            if (const auto* s = std::get_if<PulseSegment>(&p)) {
                if (!(s->duration_s > 0.0)) throw ConfigError("pulse segment duration must be positive");
                if (s->amplitude_hz < 0.0) throw ConfigError("pulse amplitude must be non-negative");
                for (int k : s->targets) check_spin(k);
            } else {
                const auto& r = std::get<RotationSpec>(p);
                if (std::abs(r.axis.norm() - 1.0) > 1e-12) throw ConfigError("rotation axis must be a unit vector");
                if (r.spin) check_spin(*r.spin);
            }
        }
    }
}

void EnsembleSpec::validate() const {
    if (members.empty()) throw ConfigError("ensemble is empty");
    double total = 0.0;
    for (const auto& m : members) {
        if (!(m.weight > 0.0)) throw ConfigError("ensemble weights must be positive");
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("ensemble weights must sum to 1");
}

EnsembleSpec EnsembleSpec::singleton() {
    return EnsembleSpec{{EnsembleMember{}}};
}

namespace {

std::vector<std::pair<double, double>> normal_grid(double sigma, int n, double span) {
    std::vector<std::pair<double, double>> pts;
    if (n == 1 || sigma == 0.0) return {{0.0, 1.0}};
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -span * sigma + 2.0 * span * sigma * i / (n - 1);
        const double w = std::exp(-0.5 * (x / sigma) * (x / sigma));
        pts.emplace_back(x, w);
        total += w;
    }
    for (auto& p : pts) p.second /= total;
    return pts;
}

}  // namespace

EnsembleSpec EnsembleSpec::b0_gaussian(double sigma_hz, int n_points, double span_sigmas) {
    if (n_points < 1) throw ConfigError("ensemble needs at least one point");
    EnsembleSpec e;
    for (auto [x, w] : normal_grid(sigma_hz, n_points, span_sigmas)) e.members.push_back({1.0, x, w});
    return e;
}

EnsembleSpec EnsembleSpec::rf_gaussian(double sigma, int n_points, double span_sigmas) {
    if (n_points < 1) throw ConfigError("ensemble needs at least one point");
    EnsembleSpec e;
    for (auto [x, w] : normal_grid(sigma, n_points, span_sigmas)) e.members.push_back({1.0 + x, 0.0, w});
    return e;
}

}  // namespace nmrqip
