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
#include <string>
#include <vector>

#include "nmrqip/operators.hpp"

namespace nmrqip {

enum class CouplingModel { full_j, weak_j, dipolar_truncated };

struct SpinSystem {
    std::vector<std::string> labels;
    std::vector<double> offsets_hz;          // rotating-frame offsets
    Eigen::MatrixXd j_hz;                    // symmetric, zero diagonal
    std::optional<Eigen::MatrixXd> d_hz;     // dipolar couplings, symmetric
    CouplingModel model = CouplingModel::weak_j;

    int n_spins() const { return static_cast<int>(offsets_hz.size()); }
    Eigen::Index dim() const { return Eigen::Index{1} << n_spins(); }

    // Throws ConfigError on a broken invariant.
    void validate() const;

    static SpinSystem uncoupled(const std::vector<double>& offsets_hz,
                                CouplingModel model = CouplingModel::weak_j);
    void set_j(int a, int b, double hz);
    void set_d(int a, int b, double hz);
};

struct ThermalParams {
    double b0_tesla = 11.74;
    double temperature_k = 300.0;
    std::vector<double> gamma_hz_per_tesla;  // Larmor Hz per tesla, per spin
};

enum class ThermalMode { exact, high_temperature };

constexpr double kProtonGammaHzPerT = 42.577478518e6;
constexpr double kCarbonGammaHzPerT = 10.7084e6;
constexpr double kFluorineGammaHzPerT = 40.078e6;

Operator internal_hamiltonian(const SpinSystem& sys);
Operator x_basis_dipolar(const SpinSystem& sys);
// Gyromagnetic ratios picked from label prefixes (C: carbon, F: fluorine, else proton).
ThermalParams default_thermal_params(const SpinSystem& sys);

StateMatrix thermal_state(const SpinSystem& sys, const ThermalParams& tp, ThermalMode mode);

// Total I along one axis.
Operator total_spin(int n_spins, Axis axis);

// Weak-coupling readout helper: h_bar*omega/(2 k_B T) for one spin.
double spin_polarization(double gamma_hz_per_tesla, double b0_tesla, double temperature_k);

std::string to_string(CouplingModel m);
CouplingModel coupling_model_from_string(const std::string& s);

}  // namespace nmrqip
