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

#include "nmrqip/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nmrqip/control.hpp"
#include "nmrqip/parallel.hpp"
#include "nmrqip/random.hpp"

namespace nmrqip {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step, int max_evals,
                             double tol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        if (vals[worst] - vals[best] < tol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
        auto along = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return x;
        };
        const auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            const auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : vals[worst])) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    return {pts[static_cast<std::size_t>(it - vals.begin())], *it, evals};
}

double smp_fidelity(const std::vector<PulseSegment>& segs, const Operator& target, const SpinSystem& sys,
                    const EnsembleSpec& ens) {
    double f = 0.0;
    for (const auto& m : ens.members) {
        SpinSystem s = sys;
        for (auto& v : s.offsets_hz) v += m.b0_offset_hz;
        const Operator h = internal_hamiltonian(s);
        Operator u = identity_op(sys.n_spins());
        for (auto seg : segs) {
            seg.amplitude_hz *= m.rf_scale;
            u = segment_propagator(seg, h) * u;
        }
        f += m.weight * avg_gate_fidelity(target, u);
    }
    return f;
}

namespace {

struct Decoder {
    double amp_cap, offset_scale, dmin, dmax;

    // Unbounded parameters per segment: amplitude, phase, offset, duration.
    std::vector<PulseSegment> decode(const std::vector<double>& x) const {
        std::vector<PulseSegment> segs(x.size() / 4);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            segs[i].amplitude_hz = amp_cap * 0.5 * (1.0 + std::sin(x[4 * i]));
            segs[i].phase_rad = x[4 * i + 1];
            segs[i].transmitter_offset_hz = offset_scale * x[4 * i + 2];
            segs[i].duration_s = dmin + (dmax - dmin) * 0.5 * (1.0 + std::sin(x[4 * i + 3]));
        }
        return segs;
    }
};

}  // namespace

SmpResult smp_optimize(const Operator& target, const SpinSystem& sys, const EnsembleSpec& ens,
                       double max_amplitude_hz, int n_segments, std::uint64_t seed, const SmpOptions& opts) {
    if (n_segments < 1) throw ConfigError("smp_optimize needs at least one segment");
    if (!(max_amplitude_hz > 0.0)) throw ConfigError("smp_optimize needs a positive amplitude cap");
    if (target.rows() != sys.dim() || !is_unitary(target, 1e-8))
        throw ConfigError("smp_optimize target must be a unitary of the system dimension");
    ens.validate();
    sys.validate();

    // Segment lengths up to a few nutation periods at the cap; offsets of the
    // order of the cap.
    Decoder dec{max_amplitude_hz,
                opts.offset_scale_hz > 0.0 ? opts.offset_scale_hz : max_amplitude_hz,
                opts.min_segment_s,
                opts.max_segment_s > 0.0 ? opts.max_segment_s : std::max(4.0 / max_amplitude_hz, 1e-4)};
    const std::size_t dim = 4 * static_cast<std::size_t>(n_segments);
    auto objective = [&](const std::vector<double>& x) {
        return 1.0 - smp_fidelity(dec.decode(x), target, sys, ens);
    };

    const std::function<NelderMeadResult(std::size_t)> restart = [&](std::size_t r) {
        CounterRng rng(seed, r);
        std::vector<double> x0(dim), step(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            x0[i] = (rng.uniform() * 2.0 - 1.0) * kPi;
            step[i] = 0.5;
        }
        for (std::size_t i = 2; i < dim; i += 4) x0[i] *= 0.1;  // offsets start near resonance
        return nelder_mead(objective, x0, step, opts.max_evals, opts.tolerance);
    };
    const auto runs = parallel_map<NelderMeadResult>(static_cast<std::size_t>(opts.restarts), restart);

    SmpResult out;
    std::size_t best = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        out.restart_fidelities.push_back(1.0 - runs[r].value);
        out.evaluations += runs[r].evaluations;
        if (runs[r].value < runs[best].value) best = r;
    }
    out.segments = dec.decode(runs[best].x);
    out.fidelity = 1.0 - runs[best].value;
    return out;
}

}  // namespace nmrqip
