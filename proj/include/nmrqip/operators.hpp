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

#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nmrqip {

using cd = std::complex<double>;
using Operator = Eigen::MatrixXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Raised for malformed configs and inputs; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Purity { pure, mixed, deviation };

struct StateMatrix {
    Operator rho;
    Purity purity = Purity::mixed;
};

enum class Axis { x, y, z, plus, minus };
enum class QuantAxis { z, x };

constexpr int kMaxSpins = 10;

// log2(dim); throws if dim is not a power of two.
int spins_for_dim(Eigen::Index dim);

Operator identity_op(int n_spins);

// Spin 0 is the leftmost tensor factor.
Operator spin_operator(int n_spins, int k, Axis axis);
Operator kron(const Operator& a, const Operator& b);

bool is_hermitian(const Operator& a, double tol = 1e-12);
bool is_unitary(const Operator& u, double tol = 1e-10);

// exp(-i h t) by eigendecomposition; h in rad/s.
Operator expm_hermitian(const Operator& h, double t);
// exp(a) by scaling and squaring, for the rare non-Hermitian generator.
Operator expm_general(const Operator& a);

// Eigendecomposition of a Hermitian generator, reused for many times.
class HermitianEvolver {
public:
    explicit HermitianEvolver(const Operator& h);
    Operator propagator(double t) const;
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Operator& eigenvectors() const { return evecs_; }
    bool diagonal() const { return diagonal_; }

private:
    Eigen::VectorXd evals_;
    Operator evecs_;
    bool diagonal_ = false;
};

double avg_gate_fidelity(const Operator& u, const Operator& v);

// Components keyed by coherence order p in [-N, N]; they sum to a.
std::map<int, Operator> coherence_order_decomposition(const Operator& a, QuantAxis axis);

// exp(-i (pi/2) sum I_y): takes sum I_z to sum I_x under R A R^dagger.
Operator z_to_x_rotation(int n_spins);

Operator commutator(const Operator& a, const Operator& b);

void validate_state(const StateMatrix& s, double tol = 1e-10);

}  // namespace nmrqip
