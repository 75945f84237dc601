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

// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "nmrqip/control.hpp"
#include "nmrqip/engine.hpp"
#include "nmrqip/experiments.hpp"
#include "nmrqip/gates.hpp"
#include "nmrqip/optimizer.hpp"
#include "nmrqip/parallel.hpp"
#include "nmrqip/presets.hpp"

using namespace nmrqip;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ExperimentResult run(const std::string& name, json params = json::object(), std::uint64_t seed = 0) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.params = std::move(params);
    cfg.seed = seed;
    return run_experiment(cfg);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Times a block and appends the runtime check.
Outcome timed(double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = body();
    const double dt = seconds_since(t0);
    o.detail += "; runtime " + fmt("%.2f", dt) + " s (limit " + fmt("%g", limit_s) + " s)";
    o.pass = o.pass && dt < limit_s;
    return o;
}

Outcome cnot() {
    return timed(1.0, [] {
        const SpinSystem sys = preset_chloroform();
        const PulseProgram p = compile_cnot(0, 1, sys);
        const double ideal = avg_gate_fidelity(program_unitary(p, sys), cnot_matrix(2, 0, 1));
        RunOptions fin;
        fin.mode = PulseMode::finite_pulses;
        fin.finite_amplitude_hz = 25e3;
        const double finite = avg_gate_fidelity(program_unitary(p, sys, fin), cnot_matrix(2, 0, 1));
        return Outcome{ideal >= 1.0 - 1e-9 && finite >= 0.99,
                       "ideal 1-F " + fmt("%.2e", 1.0 - ideal) + ", finite (25 kHz) F " + fmt("%.5f", finite)};
    });
}

Outcome bb1_law() {
    return timed(10.0, [] {
        const ExperimentResult r = run("bb1_sweep");
        const auto& t = r.files.at("bb1_sweep.csv");
        const auto eps = t.column("epsilon"), inf = t.column("infidelity_bb1"), pred = t.column("predicted_bb1");
        double lo = 1e9, hi = 0.0;
        for (std::size_t i = 0; i < eps.size(); ++i)
            if (eps[i] != 0.0 && std::abs(eps[i]) <= 0.1 + 1e-12) {
                lo = std::min(lo, inf[i] / pred[i]);
                hi = std::max(hi, inf[i] / pred[i]);
            }
        const double s6 = r.summary["slope_bb1"], s2 = r.summary["slope_single"];
        const bool ok = std::abs(s6 - 6.0) <= 0.2 && std::abs(s2 - 2.0) <= 0.1 && lo >= 0.5 && hi <= 2.0;
        return Outcome{ok, "slope BB1 " + fmt("%.3f", s6) + ", slope single " + fmt("%.3f", s2) +
                               ", ratio to formula for |eps|<=0.1 in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) +
                               "]"};
    });
}

Outcome shor() {
    return timed(30.0, [] {
        const ExperimentResult r = run("shor15");
        const auto d = r.summary["register_distribution"].get<std::vector<double>>();
        double err = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - (i % 2 == 0 ? 0.25 : 0.0)));
        const bool factors = r.summary["factors"] == json::array({3, 5});
        return Outcome{d.size() == 8 && err <= 1e-9 && factors,
                       "max distribution error " + fmt("%.1e", err) + ", factors " + r.summary["factors"].dump()};
    });
}

double bin_fraction(const std::vector<double>& x, int k) {
    const int n = static_cast<int>(x.size());
    double mean = 0.0, total = 0.0, at = 0.0;
    for (double v : x) mean += v / n;
    for (int b = 1; b < n; ++b) {
        cd s = 0.0;
        for (int i = 0; i < n; ++i) s += (x[i] - mean) * std::polar(1.0, -kTwoPi * b * i / n);
        total += std::norm(s);
        if (b == k || b == n - k) at += std::norm(s);
    }
    return total > 0.0 ? at / total : 0.0;
}

Outcome qho() {
    return timed(5.0, [] {
        const ExperimentResult r = run("qho");
        const int periods = r.resolved_config["params"]["n_periods"];
        const auto& g = r.files.at("trace_ground.csv");
        double drift = 0.0;
        for (std::size_t c = 1; c < g.header.size(); ++c) {
            const auto v = g.column(g.header[c]);
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            drift = std::max(drift, *hi - *lo);
        }
        const double f2 = bin_fraction(r.files.at("trace_zero_plus_i_two.csv").column("signal"), 2 * periods);
        const auto eq = r.files.at("trace_equal_superposition.csv").column("signal");
        const double f1 = bin_fraction(eq, periods), f3 = bin_fraction(eq, 3 * periods);
        const bool logged = r.summary.contains("binary_convention_match") && r.summary.contains("encoding");
        return Outcome{drift <= 1e-9 && f2 >= 0.99 && f1 > 0.01 && f3 > 0.01 && logged,
                       "ground drift " + fmt("%.1e", drift) + ", 2W fraction " + fmt("%.4f", f2) +
                           ", equal superposition W " + fmt("%.3f", f1) + " 3W " + fmt("%.3f", f3) +
                           ", encoding resolution recorded"};
    });
}

Outcome lines() {
    Outcome five = timed(10.0, [] {
        const ExperimentResult r = run("spectrum_lines");
        bool ok = true;
        std::string counts;
        for (const auto& [k, v] : r.summary["line_counts"].items()) {
            ok = ok && v["peaks"] == 16;
            counts += (counts.empty() ? "" : "/") + v["peaks"].dump();
        }
        return Outcome{ok && r.summary["line_counts"].size() == 5, "five_spin peaks " + counts};
    });
    Outcome seven = timed(10.0, [] {
        const ExperimentResult r = run("spectrum_lines", {{"system", "shor7"}, {"observe_spins", {0}}});
        const int n = r.summary["line_counts"]["0"]["peaks"];
        return Outcome{n == 64, "shor7 spin 0 peaks " + std::to_string(n)};
    });
    return Outcome{five.pass && seven.pass, five.detail + "; " + seven.detail};
}

Outcome readout() {
    return timed(10.0, [] {
        const ExperimentResult r = run("readout_integrals");
        const auto& in = r.summary["integrals"];
        const double h_up = in["spin0"]["partner_up"], h_dn = in["spin0"]["partner_down"];
        const double c_up = in["spin1"]["partner_up"], c_dn = in["spin1"]["partner_down"];
        // diag(0.4, 0.3, 0.2, 0.1): (a-c, b-d) = (0.2, 0.2) and (a-b, c-d) = (0.1, 0.1).
        const double r1 = (h_up / c_up) / 2.0, r2 = (h_dn / c_dn) / 2.0;
        const bool ok = std::abs(r1 - 1.0) <= 0.02 && std::abs(r2 - 1.0) <= 0.02 &&
                        std::abs(h_up / h_dn - 1.0) <= 0.02 && std::abs(c_up / c_dn - 1.0) <= 0.02;
        return Outcome{ok, "proton/carbon ratios " + fmt("%.4f", 2 * r1) + ", " + fmt("%.4f", 2 * r2) +
                               " (expected 2)"};
    });
}

Outcome cp() {
    return timed(5.0, [] {
        const ExperimentResult r = run("cp_echo", {{"sigma_hz", 50.0}, {"n_points", 21}});
        const double c = r.summary["cp_end"], f = r.summary["free_decay_end"], t = r.summary["t_end_s"];
        return Outcome{std::abs(t - 0.02) < 1e-12 && c >= 10.0 * f,
                       "at 20 ms CP " + fmt("%.4f", c) + " vs free " + fmt("%.2e", f)};
    });
}

Outcome kicks() {
    return timed(60.0, [] {
        const ExperimentResult r = run("kick_sweep");
        const auto& s = r.summary;
        const auto& p = r.resolved_config["params"];
        const bool setup = p["n_samples"] == 64 && p["j_sys_env_hz"].size() == 4;
        const double fit = s["small_min_fit_r_squared"], lin = s["small_linear_r_squared"];
        const bool ok = setup && fit >= 0.99 && lin >= 0.98 && s["small_linear_slope"].get<double>() > 0.0 &&
                        s["small_rate_count"].get<int>() >= 5 && s["uniform_peak_interior"] == true;
        return Outcome{ok, "small-angle min fit R2 " + fmt("%.4f", fit) + ", linear R2 " + fmt("%.4f", lin) +
                               " (sampled-angle estimator: " +
                               fmt("%.4f", s["sampled_estimator_min_fit_r_squared"].get<double>()) + ", " +
                               fmt("%.4f", s["sampled_estimator_linear_r_squared"].get<double>()) +
                               "), uniform peak at " + fmt("%g", s["uniform_peak_rate_per_s"].get<double>()) +
                               "/s, rate at highest kick rate " +
                               fmt("%.1f", s["uniform_last_decay_rate"].get<double>()) + " vs peak " +
                               fmt("%.1f", s["uniform_peak_decay_rate"].get<double>())};
    });
}

Outcome orders() {
    return timed(120.0, [] {
        const SpinSystem chain = preset_dipolar_chain(6);
        SpinSystem couplings = chain;
        std::fill(couplings.offsets_hz.begin(), couplings.offsets_hz.end(), 0.0);
        const Operator h = internal_hamiltonian(couplings);
        const double scale = h.cwiseAbs().maxCoeff();
        double z_off = 0.0, x_off = 0.0;
        for (const auto& [p, m] : coherence_order_decomposition(h, QuantAxis::z))
            if (p != 0) z_off = std::max(z_off, m.cwiseAbs().maxCoeff());
        bool x_has_2 = false;
        for (const auto& [p, m] : coherence_order_decomposition(h, QuantAxis::x)) {
            if (p == 0) continue;
            if (std::abs(p) == 2) x_has_2 = x_has_2 || m.cwiseAbs().maxCoeff() > 1e-6 * scale;
            else x_off = std::max(x_off, m.cwiseAbs().maxCoeff());
        }
        const ExperimentResult r = run("mq_growth");
        const bool grow = r.summary["second_moment_nondecreasing"] == true;
        return Outcome{z_off <= 1e-12 * scale && x_off <= 1e-12 * scale && x_has_2 && grow,
                       "z orders outside {0} " + fmt("%.1e", z_off / scale) + ", x orders outside {0,+-2} " +
                           fmt("%.1e", x_off / scale) + " (relative), N=6 second moment non-decreasing over " +
                           fmt("%g", r.summary["window_s"].get<double>() * 1e6) + " us: " + (grow ? "yes" : "no")};
    });
}

Outcome toggling() {
    return timed(10.0, [] {
        SpinSystem sys = SpinSystem::uncoupled({130.0, -410.0});
        sys.set_j(0, 1, 35.0);
        const Operator h = internal_hamiltonian(sys);
        const double dt = 1.3e-3;
        double worst = 0.0;
        const auto check = [&](const CompositeSequence& train) {
            const TogglingFrame tf = toggling_frame(h, train, dt);
            Operator lab = Operator::Identity(4, 4);
            for (const auto& r : train.rotations) lab = rotation_propagator(r, 2) * expm_hermitian(h, dt) * lab;
            worst = std::max(worst, (lab - tf.frame * tf.total).cwiseAbs().maxCoeff());
        };
        CompositeSequence echo;
        echo.rotations = {RotationSpec::about('x', kPi), RotationSpec::about('x', kPi)};
        check(echo);
        for (int n : {1, 2, 4, 10}) check(carr_purcell_train(n));
        const Operator offsets = internal_hamiltonian(SpinSystem::uncoupled({130.0, -410.0}));
        const double avg = toggling_frame(offsets, echo, dt).average.cwiseAbs().maxCoeff();
        const double rel = avg / offsets.cwiseAbs().maxCoeff();
        // Zero up to rounding in the pi-pulse matrix elements.
        return Outcome{worst <= 1e-10 && rel <= 1e-15,
                       "product identity error " + fmt("%.1e", worst) + ", echo offset average " + fmt("%.1e", rel) +
                           " (relative to |H|)"};
    });
}

Outcome optimizer() {
    return timed(300.0, [] {
        SpinSystem sys = SpinSystem::uncoupled({0.0, 2000.0});
        sys.set_j(0, 1, 50.0);
        const Operator target = rotation_propagator(RotationSpec::about('x', kPi / 2, 0), 2);
        const EnsembleSpec one = EnsembleSpec::singleton();
        const SmpResult r5 = smp_optimize(target, sys, one, 5e3, 4, 0);
        const SmpResult r20 = smp_optimize(target, sys, one, 20e3, 4, 0);
        const SmpResult r2 = smp_optimize(target, sys, one, 2e3, 4, 0);
        return Outcome{r5.fidelity >= 0.99 && r5.evaluations <= 8 * 5000 && r20.fidelity >= r2.fidelity,
                       "5 kHz F " + fmt("%.5f", r5.fidelity) + " (" + std::to_string(r5.evaluations) +
                           " evaluations over 8 restarts), 20 kHz F " + fmt("%.5f", r20.fidelity) + " vs 2 kHz F " +
                           fmt("%.5f", r2.fidelity)};
    });
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    return timed(300.0, [] {
        const fs::path root = fs::temp_directory_path() / "nmrqip_acceptance";
        fs::remove_all(root);
        int files = 0, differ = 0;
        const unsigned threads = thread_count();
        for (const auto& name : experiment_names()) {
            // Second run on one thread: reductions must not depend on scheduling.
            set_thread_count(threads);
            write_result(run(name, json::object(), 11), (root / name / "a").string());
            set_thread_count(1);
            write_result(run(name, json::object(), 11), (root / name / "b").string());
            for (const auto& f : fs::directory_iterator(root / name / "a")) {
                ++files;
                const fs::path other = root / name / "b" / f.path().filename();
                if (!fs::exists(other) || slurp(f.path()) != slurp(other)) ++differ;
            }
        }
        set_thread_count(threads);
        fs::remove_all(root);
        return Outcome{files > 0 && differ == 0, std::to_string(experiment_names().size()) + " experiments, " +
                                                     std::to_string(files) + " files, " + std::to_string(differ) +
                                                     " differing"};
    });
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"CNOT compilation", cnot},
        {"BB1 error law", bb1_law},
        {"Shor-15 register and factors", shor},
        {"harmonic oscillator traces", qho},
        {"spectrum line counts", lines},
        {"readout integral ratios", readout},
        {"Carr-Purcell vs free decay", cp},
        {"kick model regimes", kicks},
        {"coherence-order structure", orders},
        {"toggling-frame identity", toggling},
        {"pulse optimizer", optimizer},
        {"determinism", determinism},
    };
    int failures = 0, index = 0;
    for (const auto& [title, fn] : criteria) {
        ++index;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = Outcome{false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
