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

#include "nmrqip/operators.hpp"

#include <bit>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace nmrqip {

int spins_for_dim(Eigen::Index dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw ConfigError("operator dimension " + std::to_string(dim) + " is not a power of two");
    return std::countr_zero(static_cast<unsigned long>(dim));
}

Operator identity_op(int n_spins) {
    return Operator::Identity(Eigen::Index{1} << n_spins, Eigen::Index{1} << n_spins);
}

Operator spin_operator(int n_spins, int k, Axis axis) {
    if (n_spins < 1 || n_spins > kMaxSpins)
        throw ConfigError("n_spins out of range: " + std::to_string(n_spins));
    if (k < 0 || k >= n_spins)
        throw ConfigError("spin index " + std::to_string(k) + " out of range for " +
                          std::to_string(n_spins) + " spins");
    Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
    const cd i1(0.0, 1.0);
    switch (axis) {
    case Axis::x: p << 0, 0.5, 0.5, 0; break;
    case Axis::y: p << 0, -0.5 * i1, 0.5 * i1, 0; break;
    case Axis::z: p << 0.5, 0, 0, -0.5; break;
    case Axis::plus: p << 0, 1, 0, 0; break;
    case Axis::minus: p << 0, 0, 1, 0; break;
    }
    // The factor is sparse: build it directly instead of chaining krons.
    const Eigen::Index dim = Eigen::Index{1} << n_spins;
    const int shift = n_spins - 1 - k;
    Operator out = Operator::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const int qr = static_cast<int>((r >> shift) & 1);
        for (int qc = 0; qc < 2; ++qc) {
            if (p(qr, qc) == cd(0.0)) continue;
            const Eigen::Index c = (r & ~(Eigen::Index{1} << shift)) | (Eigen::Index{qc} << shift);
            out(r, c) = p(qr, qc);
        }
    }
    return out;
}

Operator kron(const Operator& a, const Operator& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

bool is_hermitian(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Operator& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - Operator::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

HermitianEvolver::HermitianEvolver(const Operator& h) {
    if (!is_hermitian(h, 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("expm_hermitian: generator is not Hermitian");
    const Eigen::Index n = h.rows();
    Operator off = h;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() == 0.0) {
        diagonal_ = true;
        evals_ = h.diagonal().real();
        evecs_ = Operator::Identity(n, n);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

Operator HermitianEvolver::propagator(double t) const {
    Eigen::VectorXcd ph(evals_.size());
    for (Eigen::Index i = 0; i < evals_.size(); ++i) ph(i) = std::polar(1.0, -evals_(i) * t);
    if (diagonal_) return ph.asDiagonal();
    return evecs_ * ph.asDiagonal() * evecs_.adjoint();
}

Operator expm_hermitian(const Operator& h, double t) {
    return HermitianEvolver(h).propagator(t);
}

Operator expm_general(const Operator& a) {
    return a.exp();
}

double avg_gate_fidelity(const Operator& u, const Operator& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw std::invalid_argument("avg_gate_fidelity: dimension mismatch");
    const double d = static_cast<double>(u.rows());
    const double overlap = std::norm((u.adjoint() * v).trace());
    return (d + overlap) / (d * (d + 1.0));
}

Operator z_to_x_rotation(int n_spins) {
    // exp(-i pi/2 I_y) on one spin, tensored.
    Operator r1(2, 2);
    const double s = std::sqrt(0.5);
    r1 << s, -s, s, s;
    Operator out = r1;
    for (int k = 1; k < n_spins; ++k) out = kron(out, r1);
    return out;
}

namespace {

std::map<int, Operator> z_orders(const Operator& a, int n) {
    std::map<int, Operator> out;
    for (int p = -n; p <= n; ++p) out[p] = Operator::Zero(a.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const int pc = std::popcount(static_cast<unsigned long>(c));
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            // |0> carries m = +1/2, so I_+ = |0><1| raises m and has p = +1.
            const int p = pc - std::popcount(static_cast<unsigned long>(r));
            out[p](r, c) = a(r, c);
        }
    }
    return out;
}

}  // namespace

std::map<int, Operator> coherence_order_decomposition(const Operator& a, QuantAxis axis) {
    const int n = spins_for_dim(a.rows());
    if (axis == QuantAxis::z) return z_orders(a, n);
    const Operator r = z_to_x_rotation(n);
    auto parts = z_orders(r.adjoint() * a * r, n);
    for (auto& [p, m] : parts) m = r * m * r.adjoint();
    return parts;
}

Operator commutator(const Operator& a, const Operator& b) {
    return a * b - b * a;
}

void validate_state(const StateMatrix& s, double tol) {
    const auto& rho = s.rho;
    spins_for_dim(rho.rows());
    if (!is_hermitian(rho, tol)) throw std::invalid_argument("state is not Hermitian");
    const double tr = rho.trace().real();
    if (s.purity == Purity::deviation) {
        if (std::abs(tr) > tol) throw std::invalid_argument("deviation state is not traceless");
        return;
    }
    if (std::abs(tr - 1.0) > tol) throw std::invalid_argument("state trace is not 1");
    Eigen::SelfAdjointEigenSolver<Operator> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("state is not positive");
}

}  // namespace nmrqip
