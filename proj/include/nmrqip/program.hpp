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

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace nmrqip {

// One piecewise-constant RF segment. Empty targets means every spin.
struct PulseSegment {
    double amplitude_hz = 0.0;
    double phase_rad = 0.0;
    double transmitter_offset_hz = 0.0;
    double duration_s = 0.0;
    std::vector<int> targets;
};

// R = exp(-i (1+eps) theta n.I) on one spin, or collectively when spin is empty.
struct RotationSpec {
    Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
    double angle_rad = 0.0;
    std::optional<int> spin;
    double amplitude_error = 0.0;

    static RotationSpec about(char axis, double angle, std::optional<int> spin = std::nullopt);
    static RotationSpec in_plane(double phase_rad, double angle, std::optional<int> spin = std::nullopt);
};

// Rotations listed in time order (first entry acts first).
struct CompositeSequence {
    std::vector<RotationSpec> rotations;
};

struct PulseEvent {
    std::variant<PulseSegment, RotationSpec> pulse;
};
struct DelayEvent {
    double duration_s = 0.0;
};
struct FrameZEvent {
    int spin = 0;
    double angle_rad = 0.0;
};

using ProgramEvent = std::variant<PulseEvent, DelayEvent, FrameZEvent>;

struct PulseProgram {
    std::vector<ProgramEvent> events;

    PulseProgram& rotate(const RotationSpec& r);
    PulseProgram& segment(const PulseSegment& s);
    PulseProgram& delay(double seconds);
    PulseProgram& frame_z(int spin, double angle_rad);
    PulseProgram& append(const PulseProgram& other);

    double total_duration(double finite_amplitude_hz = 0.0) const;
    void validate(int n_spins) const;
    bool empty() const { return events.empty(); }
};

struct EnsembleMember {
    double rf_scale = 1.0;
    double b0_offset_hz = 0.0;
    double weight = 1.0;
};

struct EnsembleSpec {
    std::vector<EnsembleMember> members;

    void validate() const;

    static EnsembleSpec singleton();
    // Normal weights on an evenly spaced grid spanning +-span_sigmas.
    static EnsembleSpec b0_gaussian(double sigma_hz, int n_points, double span_sigmas = 3.0);
    static EnsembleSpec rf_gaussian(double sigma, int n_points, double span_sigmas = 2.0);
};

}  // namespace nmrqip
