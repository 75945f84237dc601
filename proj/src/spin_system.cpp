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

#include "nmrqip/spin_system.hpp"

#include <cmath>

namespace nmrqip {

namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kBoltzmann = 1.380649e-23;

void check_coupling_matrix(const Eigen::MatrixXd& m, int n, const char* name) {
    if (m.rows() != n || m.cols() != n)
        throw ConfigError(std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int a = 0; a < n; ++a) {
        if (m(a, a) != 0.0) throw ConfigError(std::string(name) + " has a nonzero diagonal");
        for (int b = a + 1; b < n; ++b)
            if (std::abs(m(a, b) - m(b, a)) > 1e-12) throw ConfigError(std::string(name) + " is not symmetric");
    }
}

// I^a . I^b, built from raising/lowering so it stays real.
Operator dot(int n, int a, int b) {
    const Operator za = spin_operator(n, a, Axis::z), zb = spin_operator(n, b, Axis::z);
    const Operator pa = spin_operator(n, a, Axis::plus), ma = spin_operator(n, a, Axis::minus);
    const Operator pb = spin_operator(n, b, Axis::plus), mb = spin_operator(n, b, Axis::minus);
    return za * zb + 0.5 * (pa * mb + ma * pb);
}

}  // namespace

void SpinSystem::validate() const {
    const int n = n_spins();
    if (n < 1 || n > kMaxSpins) throw ConfigError("spin count must be in 1.." + std::to_string(kMaxSpins));
    if (!labels.empty() && static_cast<int>(labels.size()) != n) throw ConfigError("labels size mismatch");
    check_coupling_matrix(j_hz, n, "j_hz");
    if (d_hz) check_coupling_matrix(*d_hz, n, "d_hz");
    if (model == CouplingModel::dipolar_truncated && !d_hz)
        throw ConfigError("dipolar_truncated model requires d_hz");
}

SpinSystem SpinSystem::uncoupled(const std::vector<double>& offsets_hz, CouplingModel model) {
    SpinSystem s;
    s.offsets_hz = offsets_hz;
    const int n = static_cast<int>(offsets_hz.size());
    for (int k = 0; k < n; ++k) s.labels.push_back("S" + std::to_string(k));
    s.j_hz = Eigen::MatrixXd::Zero(n, n);
    s.model = model;
    return s;
}

void SpinSystem::set_j(int a, int b, double hz) {
    j_hz(a, b) = hz;
    j_hz(b, a) = hz;
}

void SpinSystem::set_d(int a, int b, double hz) {
    if (!d_hz) d_hz = Eigen::MatrixXd::Zero(n_spins(), n_spins());
    (*d_hz)(a, b) = hz;
    (*d_hz)(b, a) = hz;
}

Operator total_spin(int n_spins, Axis axis) {
    Operator out = Operator::Zero(Eigen::Index{1} << n_spins, Eigen::Index{1} << n_spins);
    for (int k = 0; k < n_spins; ++k) out += spin_operator(n_spins, k, axis);
    return out;
}

Operator internal_hamiltonian(const SpinSystem& sys) {
    sys.validate();
    const int n = sys.n_spins();
    Operator h = Operator::Zero(sys.dim(), sys.dim());
    if (sys.model == CouplingModel::dipolar_truncated) {
        // One shared Zeeman offset multiplies total I_z.
        for (int k = 1; k < n; ++k)
            if (sys.offsets_hz[k] != sys.offsets_hz[0])
                throw ConfigError("dipolar_truncated model needs one shared offset for all spins");
        h += kTwoPi * sys.offsets_hz[0] * total_spin(n, Axis::z);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const double d = (*sys.d_hz)(a, b);
                if (d == 0.0) continue;
                h += kTwoPi * d *
                     (3.0 * spin_operator(n, a, Axis::z) * spin_operator(n, b, Axis::z) - dot(n, a, b));
            }
        return h;
    }
    for (int k = 0; k < n; ++k) h += kTwoPi * sys.offsets_hz[k] * spin_operator(n, k, Axis::z);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double j = sys.j_hz(a, b);
            if (j == 0.0) continue;
            if (sys.model == CouplingModel::full_j)
                h += kTwoPi * j * dot(n, a, b);
            else
                h += kTwoPi * j * spin_operator(n, a, Axis::z) * spin_operator(n, b, Axis::z);
        }
    return h;
}

Operator x_basis_dipolar(const SpinSystem& sys) {
    if (!sys.d_hz) throw ConfigError("x_basis_dipolar requires d_hz");
    const int n = sys.n_spins();
    // In the x eigenbasis I_x is represented by the I_z matrix and the
    // x-raising/lowering pair I_y +- i I_z maps to -+i times I_+-.
    const cd i1(0.0, 1.0);
    Operator h = Operator::Zero(sys.dim(), sys.dim());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = (*sys.d_hz)(a, b);
            if (d == 0.0) continue;
            const Operator xa = spin_operator(n, a, Axis::z), xb = spin_operator(n, b, Axis::z);
            const Operator pa = -i1 * spin_operator(n, a, Axis::plus), pb = -i1 * spin_operator(n, b, Axis::plus);
            const Operator ma = i1 * spin_operator(n, a, Axis::minus), mb = i1 * spin_operator(n, b, Axis::minus);
            const Operator term = -xa * xb + 0.25 * (pa * mb + ma * pb) - 0.75 * (pa * pb + ma * mb);
            h += kTwoPi * d * term;
        }
    return h;
}

double spin_polarization(double gamma_hz_per_tesla, double b0_tesla, double temperature_k) {
    return kPlanck * std::abs(gamma_hz_per_tesla) * b0_tesla / (2.0 * kBoltzmann * temperature_k);
}

ThermalParams default_thermal_params(const SpinSystem& sys) {
    ThermalParams tp;
    for (const auto& l : sys.labels)
        tp.gamma_hz_per_tesla.push_back(l.rfind("C", 0) == 0   ? kCarbonGammaHzPerT
                                        : l.rfind("F", 0) == 0 ? kFluorineGammaHzPerT
                                                               : kProtonGammaHzPerT);
    return tp;
}

StateMatrix thermal_state(const SpinSystem& sys, const ThermalParams& tp, ThermalMode mode) {
    const int n = sys.n_spins();
    if (static_cast<int>(tp.gamma_hz_per_tesla.size()) != n)
        throw ConfigError("gamma_hz_per_tesla must list one value per spin");
    if (!(tp.temperature_k > 0.0) || !(tp.b0_tesla > 0.0))
        throw ConfigError("temperature and field must be positive");
    const Eigen::Index dim = sys.dim();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    const double beta_h = kPlanck / (kBoltzmann * tp.temperature_k);
    for (Eigen::Index s = 0; s < dim; ++s) {
        // -H_lab / (k_B T) with H_lab = -sum h nu_k I_z^k.
        for (int k = 0; k < n; ++k) {
            const double m = ((s >> (n - 1 - k)) & 1) ? -0.5 : 0.5;
            diag(s) += beta_h * tp.gamma_hz_per_tesla[k] * tp.b0_tesla * m;
        }
    }
    StateMatrix out;
    if (mode == ThermalMode::exact) {
        const double emax = diag.maxCoeff();
        Eigen::VectorXd w = (diag.array() - emax).exp();
        w /= w.sum();
        out.rho = w.cast<cd>().asDiagonal();
    } else {
        const double inv = 1.0 / static_cast<double>(dim);
        Eigen::VectorXd w = inv * (Eigen::VectorXd::Ones(dim) + diag);
        out.rho = w.cast<cd>().asDiagonal();
    }
    out.purity = Purity::mixed;
    return out;
}

std::string to_string(CouplingModel m) {
    switch (m) {
    case CouplingModel::full_j: return "full_j";
    case CouplingModel::weak_j: return "weak_j";
    case CouplingModel::dipolar_truncated: return "dipolar_truncated";
    }
    return "weak_j";
}

CouplingModel coupling_model_from_string(const std::string& s) {
    if (s == "full_j") return CouplingModel::full_j;
    if (s == "weak_j") return CouplingModel::weak_j;
    if (s == "dipolar_truncated") return CouplingModel::dipolar_truncated;
    throw ConfigError("unknown coupling model '" + s + "'");
}

}  // namespace nmrqip
