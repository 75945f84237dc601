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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nmrqip/cli.hpp"
#include "nmrqip/json_io.hpp"
#include "nmrqip/presets.hpp"

using namespace nmrqip;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "nmrqip_test_cli";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs nmrsim with stdout and stderr captured; returns the exit status.
int nmrsim(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
    fs::create_directories(kScratch);
    const fs::path o = kScratch / "stdout.txt", e = kScratch / "stderr.txt";
    const std::string cmd = std::string(NMRSIM_BIN) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    if (out) *out = slurp(o);
    if (err) *err = slurp(e);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_dir(const std::string& name) {
    const fs::path p = kScratch / name;
    fs::remove_all(p);
    return p.string();
}

void check_same_tree(const fs::path& a, const fs::path& b) {
    std::size_t n = 0;
    for (const auto& f : fs::directory_iterator(a)) {
        const fs::path other = b / f.path().filename();
        REQUIRE(fs::exists(other));
        CHECK_MESSAGE(slurp(f.path()) == slurp(other), f.path().filename().string());
        ++n;
    }
    CHECK(n == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})));
}

const std::string kData = NMRQIP_DATA_DIR;

}  // namespace

TEST_CASE("list names every experiment and preset") {
    std::string out;
    REQUIRE(nmrsim("list", &out) == kExitOk);
    for (const char* n : {"grover2", "dj2", "qho", "shor15", "bb1_sweep", "cp_echo", "kick_sweep", "mq_growth",
                          "chloroform", "shor7"})
        CHECK_MESSAGE(out.find(n) != std::string::npos, n);
}

TEST_CASE("run shor15 writes the factors") {
    const std::string o = out_dir("shor");
    REQUIRE(nmrsim("run --name shor15 --out " + o) == kExitOk);
    const json r = load_json_file(o + "/result.json");
    CHECK(r["factors"] == json::array({3, 5}));
    CHECK(fs::exists(o + "/register.csv"));
    CHECK(fs::exists(o + "/config.json"));
}

TEST_CASE("identical config and seed give identical bytes") {
    for (const char* name : {"qho", "cp_echo", "kick_sweep"}) {
        const std::string a = out_dir(std::string(name) + "_a"), b = out_dir(std::string(name) + "_b");
        REQUIRE(nmrsim(std::string("run --name ") + name + " --seed 5 --threads 1 --out " + a) == kExitOk);
        REQUIRE(nmrsim(std::string("run --name ") + name + " --seed 5 --threads 4 --out " + b) == kExitOk);
        check_same_tree(a, b);
    }
    const std::string a = out_dir("opt_a"), b = out_dir("opt_b");
    const std::string cfg = kData + "/configs/optimize_selective.json";
    REQUIRE(nmrsim("optimize-pulse --config " + cfg + " --set restarts=2 --set max_evals=800 --out " + a) == kExitOk);
    REQUIRE(nmrsim("optimize-pulse --config " + cfg + " --set restarts=2 --set max_evals=800 --out " + b) == kExitOk);
    check_same_tree(a, b);
}

TEST_CASE("resolved config reloads to the same run") {
    const std::string a = out_dir("rt_a"), b = out_dir("rt_b");
    REQUIRE(nmrsim("run --name bb1_sweep --seed 3 --set theta_rad=3.141592653589793 --out " + a) == kExitOk);
    const json cfg = load_json_file(a + "/config.json");
    CHECK(cfg["name"] == "bb1_sweep");
    CHECK(cfg["seed"] == 3);
    CHECK(cfg["params"]["theta_rad"].get<double>() == doctest::Approx(kPi));
    REQUIRE(nmrsim("run --config " + a + "/config.json --out " + b) == kExitOk);
    check_same_tree(a, b);
}

TEST_CASE("simulate then spectrum") {
    const std::string s = out_dir("sim");
    REQUIRE(nmrsim("simulate --config " + kData + "/configs/simulate_readout.json --out " + s) == kExitOk);
    const json sim = load_json_file(s + "/result.json");
    REQUIRE(sim["peaks_hz"].size() == 2);
    // Proton lines sit at nu +- J/2.
    const SpinSystem cf = preset_chloroform();
    CHECK(sim["peaks_hz"][0].get<double>() ==
          doctest::Approx(cf.offsets_hz[0] - cf.j_hz(0, 1) / 2).epsilon(1e-3));
    CHECK(sim["peaks_hz"][1].get<double>() ==
          doctest::Approx(cf.offsets_hz[0] + cf.j_hz(0, 1) / 2).epsilon(1e-3));

    write_text_file(s + "/spectrum.json", R"({"fid_csv": "fid.csv"})");
    const std::string sp = out_dir("spectrum_out");
    REQUIRE(nmrsim("spectrum --config " + s + "/spectrum.json --out " + sp) == kExitOk);
    CHECK(slurp(sp + "/spectrum.csv") == slurp(s + "/spectrum.csv"));
}

TEST_CASE("exit codes") {
    std::string err;
    CHECK(nmrsim("run --config /nonexistent/cfg.json --out " + out_dir("x"), nullptr, &err) == kExitConfig);
    CHECK(err.find("/nonexistent/cfg.json") != std::string::npos);
    CHECK(nmrsim("run --name grover2 --set bogus=1 --out " + out_dir("x"), nullptr, &err) == kExitConfig);
    CHECK(err.find("bogus") != std::string::npos);
    CHECK(nmrsim("run --name not_an_experiment --out " + out_dir("x")) == kExitConfig);
    CHECK(nmrsim("frobnicate") == kExitConfig);
    CHECK(nmrsim("simulate --out " + out_dir("x")) == kExitConfig);

    CliInvocation inv;
    inv.subcommand = "nope";
    CHECK(dispatch(inv) == kExitConfig);
}

TEST_CASE("bundled preset files match the built-in presets") {
    for (const auto& name : preset_names()) {
        const fs::path p = fs::path(kData) / "presets" / (name + ".json");
        if (!fs::exists(p)) continue;
        const SpinSystem from_file = spin_system_from_json(load_json_file(p.string()));
        CHECK_MESSAGE(to_json(from_file) == to_json(preset_by_name(name)), name);
    }
    CHECK(fs::exists(fs::path(kData) / "presets" / "shor7.json"));
}
