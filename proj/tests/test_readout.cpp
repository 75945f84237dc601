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

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "nmrqip/control.hpp"
#include "nmrqip/readout.hpp"
#include "nmrqip/spin_system.hpp"

using namespace nmrqip;

namespace {

AcquisitionConfig acq(int spin, int n, double dwell, double lb) {
    AcquisitionConfig c;
    c.observe_spin = spin;
    c.n_points = n;
    c.dwell_s = dwell;
    c.line_broadening_hz = lb;
    return c;
}

Operator after_pulse(const Operator& rho, char axis, int spin, int n) {
    const Operator u = rotation_propagator(RotationSpec::about(axis, kPi / 2, spin), n);
    return u * rho * u.adjoint();
}

}  // namespace

TEST_CASE("maximally mixed state is silent") {
    auto sys = SpinSystem::uncoupled({100.0, -150.0});
    sys.set_j(0, 1, 20.0);
    const auto fid = acquire_fid(0.25 * Operator::Identity(4, 4), internal_hamiltonian(sys), acq(0, 256, 1e-3, 0.0));
    for (const cd& v : fid) CHECK(std::abs(v) == 0.0);
    const Spectrum s = spectrum(fid, acq(0, 256, 1e-3, 0.0));
    for (double i : peak_integrals(s, {{-200.0, 0.0}, {0.0, 200.0}})) CHECK(i == 0.0);
}

// The receiver signal of a spin at offset nu turns as e^{-i 2 pi nu t}; the
// transform kernel places that at +nu.
TEST_CASE("single precessing phasor") {
    const double nu = 37.0, dwell = 1e-3;
    const auto one = SpinSystem::uncoupled({nu});
    Operator rho = 0.5 * Operator::Identity(2, 2) + 1e-4 * spin_operator(1, 0, Axis::z);
    rho = after_pulse(rho, 'y', 0, 1);
    const auto fid = acquire_fid(rho, internal_hamiltonian(one), acq(0, 200, dwell, 0.0));
    for (std::size_t i = 1; i < fid.size(); ++i) {
        CHECK(std::abs(fid[i]) == doctest::Approx(std::abs(fid[0])).epsilon(1e-10));
        CHECK(std::arg(fid[i] / fid[i - 1]) == doctest::Approx(-kTwoPi * nu * dwell).epsilon(1e-9));
    }
}

TEST_CASE("two-line beat from a weakly coupled pair") {
    const double nu = 60.0, j = 14.0, dwell = 1e-3;
    auto sys = SpinSystem::uncoupled({nu, -210.0});
    sys.set_j(0, 1, j);
    Operator rho = 0.25 * Operator::Identity(4, 4) + 1e-4 * spin_operator(2, 0, Axis::z);
    rho = after_pulse(rho, 'y', 0, 2);
    const auto fid = acquire_fid(rho, internal_hamiltonian(sys), acq(0, 300, dwell, 0.0));
    for (std::size_t i = 0; i < fid.size(); ++i) {
        const double t = i * dwell;
        const cd model = fid[0] * std::polar(1.0, -kTwoPi * nu * t) * std::cos(kPi * j * t);
        CHECK(std::abs(fid[i] - model) < 1e-12 * std::abs(fid[0]) + 1e-15);
    }
}

TEST_CASE("spectrum of a decaying phasor") {
    const double nu = 45.0, dwell = 1.0 / 512, lb = 2.0;
    const int n = 16384;
    std::vector<cd> fid(n);
    for (int i = 0; i < n; ++i) fid[i] = std::polar(std::exp(-kPi * lb * i * dwell), -kTwoPi * nu * i * dwell);
    const AcquisitionConfig c = acq(0, n, dwell, lb);
    const Spectrum s = spectrum(fid, c);
    CHECK(s.frequencies_hz.size() == static_cast<std::size_t>(n));
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 1);
    const double df = 1.0 / (n * dwell);
    CHECK(std::abs(peaks[0] - nu) <= df);
    // Absorption half-height width of exp(-pi lb t) is lb.
    std::vector<double> above;
    double top = 0.0;
    for (const cd& v : s.values) top = std::max(top, v.real());
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (s.values[i].real() >= 0.5 * top) above.push_back(s.frequencies_hz[i]);
    const double width = above.back() - above.front() + df;
    CHECK(width == doctest::Approx(lb).epsilon(0.1));
    // The conjugate phasor lands at -nu.
    for (auto& v : fid) v = std::conj(v);
    const auto neg = find_peaks(spectrum(fid, c));
    REQUIRE(neg.size() == 1);
    CHECK(std::abs(neg[0] + nu) <= df);
}

TEST_CASE("Parseval") {
    std::vector<cd> fid(1024);
    for (std::size_t i = 0; i < fid.size(); ++i) fid[i] = cd(std::sin(0.1 * i * i), std::cos(0.37 * i));
    AcquisitionConfig c = acq(0, 1024, 2e-3, 0.0);
    c.first_point_scale = 1.0;
    const Spectrum s = spectrum(fid, c);
    const double df = 1.0 / (1024 * 2e-3);
    double lhs = 0.0, rhs = 0.0;
    for (const cd& v : s.values) lhs += std::norm(v) * df;
    for (const cd& v : fid) rhs += std::norm(v) * 2e-3;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("peak integrals read out diagonal populations") {
    // diag(a, b, c, d): spin 0 lines weigh (a - c, b - d), spin 1 lines (a - b, c - d).
    const double a = 0.5, b = 0.2, c = 0.2, d = 0.1, j = 20.0;
    auto sys = SpinSystem::uncoupled({100.0, -150.0});
    sys.set_j(0, 1, j);
    const Operator h = internal_hamiltonian(sys);
    Eigen::VectorXcd diag(4);
    diag << a, b, c, d;
    const Operator rho = diag.asDiagonal();
    const double dwell = 1.0 / 1024;
    for (int k : {0, 1}) {
        const AcquisitionConfig cfg = acq(k, 16384, dwell, 0.2);
        const Spectrum s = spectrum(acquire_fid(after_pulse(rho, 'x', k, 2), h, cfg), cfg);
        const double nu = sys.offsets_hz[k];
        // Partner in |0> sits at nu + J/2 for J > 0.
        const auto ints = peak_integrals(s, {{nu, nu + j}, {nu - j, nu}});
        const double expect_ratio = k == 0 ? (a - c) / (b - d) : (a - b) / (c - d);
        CHECK(ints[0] / ints[1] == doctest::Approx(expect_ratio).epsilon(0.02));
        CHECK(ints[0] > 0.0);
    }
}

TEST_CASE("line positions") {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
    j(0, 1) = j(1, 0) = 10.0;
    j(0, 2) = j(2, 0) = 4.0;
    auto lines = weak_line_positions({50.0, 0.0, 0.0}, j, 0);
    REQUIRE(lines.size() == 4);
    std::sort(lines.begin(), lines.end());
    CHECK(lines[0] == doctest::Approx(43.0));
    CHECK(lines[3] == doctest::Approx(57.0));
    CHECK(min_line_spacing(lines) == doctest::Approx(4.0));
}
