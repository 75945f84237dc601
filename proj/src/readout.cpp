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

#include "nmrqip/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fftw3.h>

namespace nmrqip {

std::vector<cd> acquire_fid(const Operator& rho, const Operator& h, const AcquisitionConfig& cfg) {
    const int n = spins_for_dim(rho.rows());
    if (h.rows() != rho.rows()) throw ConfigError("acquire_fid: state and Hamiltonian dimensions differ");
    if (cfg.n_points < 2 || !(cfg.dwell_s > 0.0)) throw ConfigError("acquire_fid needs n_points >= 2 and dwell > 0");
    const Operator obs = spin_operator(n, cfg.observe_spin, Axis::minus);  // i I_x + I_y = i I_-
    const HermitianEvolver ev(h);
    const Operator& v = ev.eigenvectors();
    const Operator r = v.adjoint() * rho * v;
    const Operator o = v.adjoint() * obs * v;
    // tr[rho(t) O] = sum_ab r_ab O_ba e^{-i (E_a - E_b) t}
    struct Line {
        cd amp;
        double w;
    };
    std::vector<Line> lines;
    const Eigen::Index d = rho.rows();
    double scale = 0.0;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) scale = std::max(scale, std::abs(r(a, b) * o(b, a)));
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            const cd amp = r(a, b) * o(b, a);
            if (std::abs(amp) > 1e-15 * scale && std::abs(amp) > 0.0)
                lines.push_back({amp, ev.eigenvalues()(a) - ev.eigenvalues()(b)});
        }
    const cd pref = -2.0 * cfg.v0 * cd(0.0, 1.0);
    std::vector<cd> fid(cfg.n_points);
    for (int j = 0; j < cfg.n_points; ++j) {
        const double t = j * cfg.dwell_s;
        cd acc = 0.0;
        for (const auto& ln : lines) acc += ln.amp * std::polar(1.0, -ln.w * t);
        fid[j] = pref * acc * std::exp(-kPi * cfg.line_broadening_hz * t);
    }
    return fid;
}

Spectrum spectrum(const std::vector<cd>& fid, const AcquisitionConfig& cfg) {
    const int n = static_cast<int>(fid.size());
    if (n < 2 || !(cfg.dwell_s > 0.0)) throw ConfigError("spectrum needs at least two points and dwell > 0");
    const int shift = n / 2;
    // S(f_m) = dwell sum_j v_j e^{+2 pi i f_m t_j}, f_m = (m - shift)/(n dwell).
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const cd v = fid[j] * (j == 0 ? cfg.first_point_scale : 1.0) *
                     std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long long>(shift) * j) % n) / n);
        buf[j][0] = v.real();
        buf[j][1] = v.imag();
    }
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    Spectrum s;
    s.observe_spin = cfg.observe_spin;
    s.frequencies_hz.resize(n);
    s.values.resize(n);
    for (int m = 0; m < n; ++m) {
        s.frequencies_hz[m] = (m - shift) / (n * cfg.dwell_s);
        s.values[m] = cfg.dwell_s * cd(buf[m][0], buf[m][1]);
    }
    fftw_free(buf);
    return s;
}

double zero_order_phase(const Spectrum& s) {
    cd total = 0.0;
    for (const auto& v : s.values) total += v;
    return std::abs(total) > 0.0 ? -std::arg(total) : 0.0;
}

std::vector<double> peak_integrals(const Spectrum& s, const std::vector<std::pair<double, double>>& windows) {
    for (std::size_t a = 0; a < windows.size(); ++a) {
        if (!(windows[a].first < windows[a].second)) throw ConfigError("integral window must have lo < hi");
        for (std::size_t b = a + 1; b < windows.size(); ++b)
            if (windows[a].first < windows[b].second && windows[b].first < windows[a].second)
                throw ConfigError("integral windows overlap");
    }
    const cd rot = std::polar(1.0, zero_order_phase(s));
    const double df = s.frequencies_hz.size() > 1 ? s.frequencies_hz[1] - s.frequencies_hz[0] : 0.0;
    std::vector<double> out;
    for (const auto& [lo, hi] : windows) {
        double acc = 0.0;
        for (std::size_t m = 0; m < s.values.size(); ++m)
            if (s.frequencies_hz[m] >= lo && s.frequencies_hz[m] < hi) acc += (rot * s.values[m]).real();
        out.push_back(acc * df);
    }
    return out;
}

std::vector<double> find_peaks(const Spectrum& s, double threshold_factor) {
    const std::size_t n = s.values.size();
    std::vector<double> mag(n);
    for (std::size_t m = 0; m < n; ++m) mag[m] = std::abs(s.values[m]);
    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double thresh = threshold_factor * sorted[n / 2];
    std::vector<double> peaks;
    for (std::size_t m = 1; m + 1 < n; ++m)
        if (mag[m] > thresh && mag[m] > mag[m - 1] && mag[m] >= mag[m + 1]) peaks.push_back(s.frequencies_hz[m]);
    return peaks;
}

std::vector<double> weak_line_positions(const std::vector<double>& offsets_hz, const Eigen::MatrixXd& j_hz, int k) {
    const int n = static_cast<int>(offsets_hz.size());
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
        if (j != k) others.push_back(j);
    std::vector<double> lines;
    for (int s = 0; s < (1 << others.size()); ++s) {
        double f = offsets_hz[k];
        for (std::size_t i = 0; i < others.size(); ++i) {
            const bool down = (s >> (others.size() - 1 - i)) & 1;
            f += (down ? -0.5 : 0.5) * j_hz(k, others[i]);
        }
        lines.push_back(f);
    }
    return lines;
}

double min_line_spacing(std::vector<double> lines) {
    std::sort(lines.begin(), lines.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < lines.size(); ++i) gap = std::min(gap, lines[i] - lines[i - 1]);
    return gap;
}

}  // namespace nmrqip
