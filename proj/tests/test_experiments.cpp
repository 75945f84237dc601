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

#include <set>

#include "nmrqip/experiments.hpp"
#include "nmrqip/presets.hpp"
#include "nmrqip/readout.hpp"

using namespace nmrqip;

namespace {

ExperimentResult run(const std::string& name, json params = json::object(), std::uint64_t seed = 0) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.params = std::move(params);
    cfg.seed = seed;
    return run_experiment(cfg);
}

// Fraction of non-DC energy of a real series that sits in DFT bin k (and its mirror).
double bin_energy_fraction(const std::vector<double>& x, int k) {
    const int n = static_cast<int>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v / n;
    double total = 0.0, at_k = 0.0;
    for (int b = 1; b < n; ++b) {
        cd s = 0.0;
        for (int i = 0; i < n; ++i) s += (x[i] - mean) * std::polar(1.0, -kTwoPi * b * i / n);
        total += std::norm(s);
        if (b == k || b == n - k) at_k += std::norm(s);
    }
    return total > 0.0 ? at_k / total : 0.0;
}

}  // namespace

TEST_CASE("Shor multipliers") {
    std::set<int> img7, img4;
    for (int y = 0; y < 16; ++y) {
        if (y >= 1 && y <= 14) {
            CHECK(shor_mul7(y) == 7 * y % 15);
            CHECK(shor_mul4(y) == 4 * y % 15);
        }
        img7.insert(shor_mul7(y));
        img4.insert(shor_mul4(y));
    }
    CHECK(img7.size() == 16);
    CHECK(img4.size() == 16);
    CHECK(shor_mul7(0) == 15);
    CHECK(shor_mul4(15) == 15);
    // 7^2 = 4 mod 15 on the orbit of 1.
    for (int y : {1, 7, 4, 13}) CHECK(shor_mul7(shor_mul7(y)) == shor_mul4(y));
}

TEST_CASE("helpers") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 24, 192, 1536}) == doctest::Approx(3.0));
    CsvTable t{{"a", "b"}, {{1.0, 0.5}, {2.0, 0.25}}};
    CHECK(t.render() == "a,b\n1,0.5\n2,0.25\n");
    CHECK(t.column("b") == std::vector<double>{0.5, 0.25});
    CHECK_THROWS(t.column("c"));
    CHECK(experiment_names().size() >= 8);
    CHECK_THROWS_AS(run("nope"), ConfigError);
    CHECK_THROWS_AS(run("grover2", {{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(run("grover2", {{"marked", 9}}), ConfigError);
}

TEST_CASE("Grover search on two qubits") {
    for (int m = 0; m < 4; ++m) {
        const ExperimentResult r = run("grover2", {{"marked", m}});
        const auto row = r.files.at("populations.csv").rows.at(0);
        for (int s = 0; s < 4; ++s) CHECK(row[1 + s] == doctest::Approx(s == m ? 1.0 : 0.0).epsilon(1e-9));
    }
    const ExperimentResult fin = run("grover2", {{"mode", "finite"}});
    CHECK(fin.summary["min_marked_population"].get<double>() >= 0.98);
}

TEST_CASE("Deutsch-Jozsa") {
    for (const char* mode : {"ideal", "finite"}) {
        const ExperimentResult r = run("dj2", {{"mode", mode}});
        CHECK(r.summary["verdicts"]["constant_0"] == "constant");
        CHECK(r.summary["verdicts"]["constant_1"] == "constant");
        CHECK(r.summary["verdicts"]["balanced_identity"] == "balanced");
        CHECK(r.summary["verdicts"]["balanced_not"] == "balanced");
    }
}

TEST_CASE("harmonic oscillator traces") {
    const ExperimentResult r = run("qho");
    const int periods = 4;
    const auto& ground = r.files.at("trace_ground.csv");
    for (const auto& col : {"re_rho01", "re_rho02", "re_rho03", "signal", "pop0"}) {
        const auto v = ground.column(col);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        CHECK(*hi - *lo < 1e-9);
    }
    const auto two = r.files.at("trace_zero_plus_i_two.csv").column("signal");
    CHECK(bin_energy_fraction(two, 2 * periods) >= 0.99);
    const auto eq = r.files.at("trace_equal_superposition.csv").column("signal");
    CHECK(bin_energy_fraction(eq, periods) > 0.1);
    CHECK(bin_energy_fraction(eq, 3 * periods) > 0.01);
    CHECK(r.summary["pulse_level_vs_u_min_fidelity"].get<double>() > 1.0 - 1e-9);
    CHECK(r.summary["binary_convention_match"] == false);
}

TEST_CASE("Shor-15") {
    const ExperimentResult r = run("shor15");
    const auto dist = r.summary["register_distribution"].get<std::vector<double>>();
    REQUIRE(dist.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(dist[i] == doctest::Approx(i % 2 == 0 ? 0.25 : 0.0).epsilon(1e-9));
    CHECK(r.summary["factors"] == json::array({3, 5}));
    CHECK(r.summary["work_values"] == json::array({1, 4, 7, 13}));
}

TEST_CASE("BB1 sweep") {
    const ExperimentResult r = run("bb1_sweep");
    const auto& t = r.files.at("bb1_sweep.csv");
    const auto eps = t.column("epsilon");
    const auto bb1 = t.column("infidelity_bb1");
    const auto single = t.column("infidelity_single");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (eps[i] == 0.0) {
            CHECK(std::abs(bb1[i]) < 1e-14);
            CHECK(std::abs(single[i]) < 1e-14);
        }
    CHECK(r.summary["slope_bb1"].get<double>() == doctest::Approx(6.0).epsilon(0.2 / 6));
    CHECK(r.summary["slope_single"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Carr-Purcell echo") {
    const ExperimentResult wide = run("cp_echo");
    CHECK(wide.summary["cp_end"].get<double>() >= 10.0 * wide.summary["free_decay_end"].get<double>());
    const ExperimentResult single = run("cp_echo", {{"n_points", 1}});
    for (const auto& col : {"free_decay", "cp_echo"})
        for (double v : single.files.at("cp_echo.csv").column(col)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    // Shorter spacing preserves at least as well under an offset.
    const double slow = run("cp_echo", {{"offset_hz", 30.0}, {"tau_s", 2e-3}, {"n_echoes", 5}})
                            .summary["cp_end"]
                            .get<double>();
    const double fast = run("cp_echo", {{"offset_hz", 30.0}, {"tau_s", 1e-4}, {"n_echoes", 100}})
                            .summary["cp_end"]
                            .get<double>();
    CHECK(fast >= slow - 1e-12);
    CHECK(fast > 0.999);
}

TEST_CASE("multiple-quantum growth") {
    const ExperimentResult r = run("mq_growth", {{"n_spins", 4}, {"t_max_s", 30e-6}, {"n_times", 31}});
    const auto& t = r.files.at("mq_growth.csv");
    CHECK(t.rows.front()[t.header.size() - 1] < 1e-20);
    for (const auto& col : {"I_p-1", "I_p1", "I_p2"}) CHECK(t.column(col).front() < 1e-20);
    CHECK(t.column("I_p0").front() == doctest::Approx(1.0));
    CHECK(r.summary["second_moment_nondecreasing"] == true);
    CHECK(r.summary["max_odd_order_weight"].get<double>() < 1e-12);
}

TEST_CASE("spectrum line counts") {
    const ExperimentResult r = run("spectrum_lines", {{"observe_spins", {0, 3}}});
    const SpinSystem sys = preset_five_spin();
    for (int k : {0, 3}) {
        auto lines = weak_line_positions(sys.offsets_hz, sys.j_hz, k);
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end(), [](double a, double b) { return b - a < 1e-9; }),
                    lines.end());
        CHECK(lines.size() == 16);
        CHECK(r.summary["line_counts"][std::to_string(k)]["peaks"].get<int>() == 16);
    }
}

TEST_CASE("readout integrals") {
    const ExperimentResult r = run("readout_integrals");
    const auto& in = r.summary["integrals"];
    const double p0 = in["spin0"]["partner_up"], p1 = in["spin0"]["partner_down"];
    const double c0 = in["spin1"]["partner_up"], c1 = in["spin1"]["partner_down"];
    // (a - c, b - d) = (0.2, 0.2) against (a - b, c - d) = (0.1, 0.1).
    CHECK(p0 / c0 == doctest::Approx(2.0).epsilon(0.02));
    CHECK(p1 / c1 == doctest::Approx(2.0).epsilon(0.02));
    CHECK(p0 / p1 == doctest::Approx(1.0).epsilon(0.02));
    const ExperimentResult flat = run("readout_integrals", {{"diagonal", {0.25, 0.25, 0.25, 0.25}}});
    CHECK(std::abs(flat.summary["integrals"]["spin0"]["partner_up"].get<double>()) < 1e-12);
}

TEST_CASE("kick sweep") {
    const ExperimentResult r = run("kick_sweep");
    CHECK(r.summary["small_min_fit_r_squared"].get<double>() >= 0.99);
    CHECK(r.summary["small_linear_r_squared"].get<double>() >= 0.98);
    CHECK(r.summary["small_linear_slope"].get<double>() > 0.0);
    CHECK(r.summary["small_rate_count"].get<int>() >= 5);
    CHECK(r.summary["uniform_peak_interior"] == true);
    CHECK(r.summary["uniform_last_decay_rate"].get<double>() < r.summary["uniform_peak_decay_rate"].get<double>());
    // Each environment spin is kicked at the given rate. Sampled at recurrences, a
    // kick keeps (1 + e^{-sigma^2/2}) / 2 ~ 1 - sigma^2/4 of the coherence, so four
    // spins give a slope of sigma^2.
    const double s = 0.05;
    CHECK(r.summary["small_linear_slope"].get<double>() == doctest::Approx(s * s).epsilon(0.05));
}
