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

#include "nmrqip/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "nmrqip/control.hpp"
#include "nmrqip/engine.hpp"
#include "nmrqip/parallel.hpp"
#include "nmrqip/random.hpp"

namespace nmrqip {

namespace {

bool finite_positive(double x) { return x > 0.0; }

}  // namespace

void RelaxationModel::validate(int n_spins) const {
    if (static_cast<int>(t1_s.size()) != n_spins || static_cast<int>(t2_s.size()) != n_spins)
        throw ConfigError("relaxation model needs T1 and T2 for every spin");
    if (!equilibrium_polarization.empty() && static_cast<int>(equilibrium_polarization.size()) != n_spins)
        throw ConfigError("equilibrium polarization needs one entry per spin");
    for (int k = 0; k < n_spins; ++k) {
        if (!finite_positive(t1_s[k]) || !finite_positive(t2_s[k])) throw ConfigError("T1 and T2 must be positive");
        if (t2_s[k] > 2.0 * t1_s[k] * (1.0 + 1e-12)) throw ConfigError("T2 must not exceed 2 T1");
    }
    for (double p : equilibrium_polarization)
        if (std::abs(p) > 1.0) throw ConfigError("equilibrium polarization must lie in [-1, 1]");
}

RelaxationModel RelaxationModel::uniform(int n_spins, double t1_s, double t2_s) {
    RelaxationModel m;
    m.t1_s.assign(n_spins, t1_s);
    m.t2_s.assign(n_spins, t2_s);
    return m;
}

void apply_relaxation_step(Operator& rho, const RelaxationModel& rm, double dt) {
    const int n = spins_for_dim(rho.rows());
    const Eigen::Index dim = rho.rows();
    for (int k = 0; k < n; ++k) {
        const double inv_t1 = std::isinf(rm.t1_s[k]) ? 0.0 : 1.0 / rm.t1_s[k];
        const double inv_t2 = std::isinf(rm.t2_s[k]) ? 0.0 : 1.0 / rm.t2_s[k];
        const double gamma = -std::expm1(-dt * inv_t1);
        const double coh = std::exp(-dt * inv_t2);  // total coherence factor
        if (gamma == 0.0 && coh == 1.0) continue;
        const double pol = rm.equilibrium_polarization.empty() ? 0.0 : rm.equilibrium_polarization[k];
        const double p = 0.5 * (1.0 + pol);  // equilibrium population of |0>
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - k);
        for (Eigen::Index c = 0; c < dim; ++c) {
            for (Eigen::Index r = 0; r < dim; ++r) {
                const bool br = r & bit, bc = c & bit;
                if (br != bc) {
                    rho(r, c) *= coh;
                } else if (!br) {
                    // Generalized amplitude damping on the (0,0)/(1,1) block pair.
                    const Eigen::Index r1 = r | bit, c1 = c | bit;
                    const cd a = rho(r, c), d = rho(r1, c1);
                    rho(r, c) = (1.0 - gamma * (1.0 - p)) * a + gamma * p * d;
                    rho(r1, c1) = (1.0 - gamma * p) * d + gamma * (1.0 - p) * a;
                }
            }
        }
    }
}

StateMatrix evolve_with_relaxation(const StateMatrix& rho, const Operator& h, const RelaxationModel& rm,
                                   double t, double dt) {
    const int n = spins_for_dim(rho.rho.rows());
    rm.validate(n);
    if (h.rows() != rho.rho.rows()) throw ConfigError("Hamiltonian and state dimensions differ");
    if (!(dt > 0.0) || dt > t) throw ConfigError("evolve_with_relaxation needs 0 < dt <= t");
    double tmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) tmin = std::min({tmin, rm.t1_s[k], rm.t2_s[k]});
    const double hnorm = h.cwiseAbs().maxCoeff();
    if (dt > 0.1 * tmin || dt * hnorm > 0.5)
        std::cerr << "warning: relaxation step " << dt << " s is coarse for this model\n";

    const HermitianEvolver ev(h);
    const long steps = static_cast<long>(std::floor(t / dt + 1e-9));
    const double rest = t - steps * dt;
    const Operator u = ev.propagator(dt);
    StateMatrix out = rho;
    for (long s = 0; s < steps; ++s) {
        out.rho = u * out.rho * u.adjoint();
        apply_relaxation_step(out.rho, rm, dt);
    }
    if (rest > 1e-15) {
        const Operator ur = ev.propagator(rest);
        out.rho = ur * out.rho * ur.adjoint();
        apply_relaxation_step(out.rho, rm, rest);
    }
    return out;
}

Operator relaxation_lindbladian(const Operator& h, const RelaxationModel& rm) {
    const int n = spins_for_dim(h.rows());
    rm.validate(n);
    const Eigen::Index d = h.rows();
    const Operator id = Operator::Identity(d, d);
    const cd i1(0.0, 1.0);
    // vec(A X B) = (B^T kron A) vec(X) for column stacking.
    Operator l = -i1 * (kron(id, h) - kron(h.transpose(), id));
    auto dissipator = [&](const Operator& c, double rate) {
        if (rate <= 0.0) return;
        const Operator cdc = c.adjoint() * c;
        l += rate * (kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id));
    };
    for (int k = 0; k < n; ++k) {
        const double inv_t1 = std::isinf(rm.t1_s[k]) ? 0.0 : 1.0 / rm.t1_s[k];
        const double inv_t2 = std::isinf(rm.t2_s[k]) ? 0.0 : 1.0 / rm.t2_s[k];
        const double pol = rm.equilibrium_polarization.empty() ? 0.0 : rm.equilibrium_polarization[k];
        const double p = 0.5 * (1.0 + pol);
        const Operator lower_to_0 = spin_operator(n, k, Axis::plus);   // |0><1|
        const Operator raise_to_1 = spin_operator(n, k, Axis::minus);  // |1><0|
        dissipator(lower_to_0, p * inv_t1);
        dissipator(raise_to_1, (1.0 - p) * inv_t1);
        // sigma_z = 2 I_z dephasing adds 2 kappa to the coherence decay rate.
        dissipator(2.0 * spin_operator(n, k, Axis::z), 0.5 * (inv_t2 - 0.5 * inv_t1));
    }
    return l;
}

void KickModel::validate() const {
    if (n_env < 1) throw ConfigError("kick model needs at least one environment spin");
    if (n_env + 1 > kMaxSpins) throw ConfigError("kick model dimension exceeds 1024");
    if (!(kick_rate_per_s >= 0.0)) throw ConfigError("kick rate must be non-negative");
    if (static_cast<int>(j_sys_env_hz.size()) != n_env) throw ConfigError("j_sys_env_hz needs n_env entries");
    if (!omega_env_hz.empty() && static_cast<int>(omega_env_hz.size()) != n_env)
        throw ConfigError("omega_env_hz needs n_env entries");
    if (kick_axis != 'x' && kick_axis != 'y' && kick_axis != 'z') throw ConfigError("kick axis must be x, y or z");
}

namespace {

struct KickTrace {
    std::vector<cd> values;
    long long kicks = 0;
};

KickTrace kick_realization(const KickModel& km, const Eigen::VectorXd& energies, double duration_s,
                           const std::vector<double>& times, std::uint64_t sample) {
    const int n = km.n_env + 1;
    const Eigen::Index dim = Eigen::Index{1} << n;
    CounterRng rng(km.seed, km.antithetic ? sample / 2 : sample);
    const double angle_sign = km.antithetic && (sample % 2) ? -1.0 : 1.0;
    const Eigen::Vector3d axis = km.kick_axis == 'x'   ? Eigen::Vector3d::UnitX()
                                 : km.kick_axis == 'y' ? Eigen::Vector3d::UnitY()
                                                       : Eigen::Vector3d::UnitZ();
    const Eigen::Index sys_bit = Eigen::Index{1} << (n - 1);

    // Kick schedule first, so every initial environment state sees the same kicks.
    struct Kick {
        double t;
        std::vector<Eigen::Matrix2cd> ops;
    };
    std::vector<Kick> kicks;
    if (km.kick_rate_per_s > 0.0) {
        const double grid_phase = rng.uniform();
        double t = km.timing == KickTiming::poisson ? rng.exponential(km.kick_rate_per_s) : grid_phase / km.kick_rate_per_s;
        for (long long k = 1; t <= duration_s; ++k) {
            Kick kick{t, {}};
            for (int e = 0; e < km.n_env; ++e) {
                const double theta = angle_sign * (km.angle_dist == KickAngleDist::small_gaussian
                                                       ? km.sigma_rad * rng.normal()
                                                       : kTwoPi * rng.uniform());
                kick.ops.push_back(su2_rotation(axis, theta));
            }
            kicks.push_back(std::move(kick));
            t = km.timing == KickTiming::poisson ? t + rng.exponential(km.kick_rate_per_s)
                                                 : (k + grid_phase) / km.kick_rate_per_s;
        }
    }

    KickTrace out;
    out.kicks = static_cast<long long>(kicks.size());
    out.values.assign(times.size(), cd(0.0));
    {
        // System and environment all start in |+x>.
        Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(dim, cd(std::pow(0.5, 0.5 * n), 0.0));
        auto evolve = [&](double dt) {
            if (dt <= 0.0) return;
            for (Eigen::Index i = 0; i < dim; ++i) psi(i) *= std::polar(1.0, -energies(i) * dt);
        };
        auto apply = [&](const Kick& kick) {
            for (int e = 0; e < km.n_env; ++e) {
                const auto& m = kick.ops[e];
                const Eigen::Index bit = Eigen::Index{1} << (n - 2 - e);
                for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
                    if (r0 & bit) continue;
                    const cd a = psi(r0), b = psi(r0 | bit);
                    psi(r0) = m(0, 0) * a + m(0, 1) * b;
                    psi(r0 | bit) = m(1, 0) * a + m(1, 1) * b;
                }
            }
        };
        auto coherence = [&] {
            // <I_+> = sum over pairs <psi|0 e><1 e|psi>.
            cd acc = 0.0;
            for (Eigen::Index i = 0; i < sys_bit; ++i) acc += std::conj(psi(i)) * psi(i | sys_bit);
            return acc;
        };
        double now = 0.0;
        std::size_t next = 0;
        for (std::size_t j = 0; j < times.size(); ++j) {
            while (next < kicks.size() && kicks[next].t <= times[j]) {
                evolve(kicks[next].t - now);
                now = kicks[next].t;
                apply(kicks[next++]);
            }
            evolve(times[j] - now);
            now = times[j];
            out.values[j] = coherence();
        }
    }
    return out;
}

// Realization with the kick angles integrated out. For a symmetric angle law,
// E[R rho R^dag] = (1+c)/2 rho + (1-c)/2 P rho P with c = E[cos theta] and P the
// Pauli matrix along the kick axis. With no environment-environment coupling and
// local kicks, the system-coherence block <1 e'|rho|0 e> stays a product of 2x2
// blocks B_k, and <I_+> = 1/2 e^{i w_s t} prod_k tr B_k.
KickTrace kick_realization_exact(const KickModel& km, double duration_s, const std::vector<double>& times,
                                 std::uint64_t sample) {
    CounterRng rng(km.seed, sample);
    const double c = km.angle_dist == KickAngleDist::small_gaussian ? std::exp(-0.5 * km.sigma_rad * km.sigma_rad) : 0.0;
    Eigen::Matrix2cd pauli;
    if (km.kick_axis == 'x') pauli << 0, 1, 1, 0;
    else if (km.kick_axis == 'y') pauli << 0, cd(0, -1), cd(0, 1), 0;
    else pauli << 1, 0, 0, -1;

    std::vector<Eigen::Matrix2cd> blocks(km.n_env, Eigen::Matrix2cd::Constant(cd(0.5, 0.0)));  // |+x><+x|
    // Branch energies per environment level m = +1/2, -1/2 with the system in |1> (h1) or |0> (h0).
    std::vector<Eigen::Vector2d> h1(km.n_env), h0(km.n_env);
    for (int e = 0; e < km.n_env; ++e) {
        const double w = km.omega_env_hz.empty() ? 0.0 : km.omega_env_hz[e];
        const double j = km.j_sys_env_hz[e];
        h1[e] << kTwoPi * (w - 0.5 * j) * 0.5, -kTwoPi * (w - 0.5 * j) * 0.5;
        h0[e] << kTwoPi * (w + 0.5 * j) * 0.5, -kTwoPi * (w + 0.5 * j) * 0.5;
    }
    auto evolve = [&](double dt) {
        if (dt <= 0.0) return;
        for (int e = 0; e < km.n_env; ++e)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) blocks[e](a, b) *= std::polar(1.0, -(h1[e](a) - h0[e](b)) * dt);
    };
    auto kick = [&] {
        for (auto& blk : blocks) blk = 0.5 * (1.0 + c) * blk + 0.5 * (1.0 - c) * (pauli * blk * pauli);
    };
    KickTrace out;
    double now = 0.0;
    double t_kick = std::numeric_limits<double>::infinity();
    double grid_phase = 0.0;
    if (km.kick_rate_per_s > 0.0) {
        grid_phase = rng.uniform();
        t_kick = km.timing == KickTiming::poisson ? rng.exponential(km.kick_rate_per_s) : grid_phase / km.kick_rate_per_s;
    }
    long long k = 0;
    for (double ts : times) {
        while (t_kick <= ts && t_kick <= duration_s) {
            evolve(t_kick - now);
            now = t_kick;
            kick();
            ++out.kicks;
            ++k;
            t_kick = km.timing == KickTiming::poisson ? t_kick + rng.exponential(km.kick_rate_per_s)
                                                      : (k + grid_phase) / km.kick_rate_per_s;
        }
        evolve(ts - now);
        now = ts;
        cd acc = 0.5 * std::polar(1.0, kTwoPi * km.omega_sys_hz * ts);
        for (const auto& blk : blocks) acc *= blk.trace();
        out.values.push_back(acc);
    }
    return out;
}

}  // namespace

KickRun kick_model_run(const KickModel& km, double duration_s, int n_samples, int n_times) {
    km.validate();
    if (n_samples < 1 || n_times < 2 || !(duration_s > 0.0)) throw ConfigError("kick run needs samples, times, duration");
    const int n = km.n_env + 1;
    const Eigen::Index dim = Eigen::Index{1} << n;
    // Diagonal Hamiltonian: omega_1 I_z^1 + sum omega_k I_z^k + 2 pi sum J_1k I_z^1 I_z^k.
    Eigen::VectorXd energies(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        auto m = [&](int k) { return ((s >> (n - 1 - k)) & 1) ? -0.5 : 0.5; };
        double e = kTwoPi * km.omega_sys_hz * m(0);
        for (int k = 1; k < n; ++k) {
            const double w = km.omega_env_hz.empty() ? 0.0 : km.omega_env_hz[k - 1];
            e += kTwoPi * w * m(k) + kTwoPi * km.j_sys_env_hz[k - 1] * m(0) * m(k);
        }
        energies(s) = e;
    }
    KickRun run;
    for (int i = 0; i < n_times; ++i) run.times_s.push_back(duration_s * i / (n_times - 1));
    const std::function<KickTrace(std::size_t)> one = [&](std::size_t s) {
        return km.angle_average == KickAngleAverage::exact ? kick_realization_exact(km, duration_s, run.times_s, s)
                                                           : kick_realization(km, energies, duration_s, run.times_s, s);
    };
    const auto traces = parallel_map<KickTrace>(static_cast<std::size_t>(n_samples), one);
    // The single trajectory is always a sampled pure-state realization.
    run.single = km.angle_average == KickAngleAverage::exact
                     ? kick_realization(km, energies, duration_s, run.times_s, 0).values
                     : traces.front().values;
    run.average.assign(n_times, cd(0.0));
    for (const auto& tr : traces) {
        for (int i = 0; i < n_times; ++i) run.average[i] += tr.values[i];
        run.total_kicks += tr.kicks;
    }
    for (auto& v : run.average) v /= static_cast<double>(n_samples);
    return run;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double floor_fraction) {
    DecayFit fit;
    if (t.size() != y.size() || t.size() < 8) return fit;
    const double y0 = std::abs(y.front());
    if (!(y0 > 0.0)) return fit;
    std::size_t m = 0;
    while (m < y.size() && std::abs(y[m]) >= floor_fraction * y0) ++m;
    if (m < 8) {
        fit.points_used = static_cast<int>(m);
        return fit;
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double ly = std::log(std::abs(y[i]));
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
    }
    const double nn = static_cast<double>(m);
    const double denom = nn * stt - st * st;
    const double slope = (nn * sty - st * sy) / denom;
    const double icpt = (sy - slope * st) / nn;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / nn;
    for (std::size_t i = 0; i < m; ++i) {
        const double ly = std::log(std::abs(y[i]));
        ss_res += std::pow(ly - (icpt + slope * t[i]), 2);
        ss_tot += std::pow(ly - mean, 2);
    }
    fit.rate_per_s = std::abs(slope) < 1e-12 ? 0.0 : -slope;
    // A flat series is a perfect (rate zero) fit.
    fit.r_squared = ss_tot < 1e-24 ? 1.0 : 1.0 - ss_res / ss_tot;
    fit.points_used = static_cast<int>(m);
    fit.good = true;
    return fit;
}

DecayFit fit_envelope_decay(const std::vector<double>& t, const std::vector<double>& y, double floor_fraction) {
    std::vector<double> env(y.size());
    double run = 0.0;
    for (std::size_t i = y.size(); i-- > 0;) {
        run = std::max(run, std::abs(y[i]));
        env[i] = run;
    }
    return fit_decay_rate(t, env, floor_fraction);
}

}  // namespace nmrqip
