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

#include "nmrqip/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nmrqip/control.hpp"
#include "nmrqip/engine.hpp"
#include "nmrqip/experiments.hpp"
#include "nmrqip/optimizer.hpp"
#include "nmrqip/parallel.hpp"
#include "nmrqip/presets.hpp"
#include "nmrqip/readout.hpp"

namespace nmrqip {

namespace {

// "a.b=v" sets j["a"]["b"]; v is parsed as JSON and falls back to a string.
void apply_override(json& j, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' must be key=value");
    const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    std::string ptr = "/" + key;
    std::replace(ptr.begin(), ptr.end(), '.', '/');
    j[json::json_pointer(ptr)] = value;
}

json load_config(const CliInvocation& inv) {
    json cfg = inv.config_path.empty() ? json::object() : load_json_file(inv.config_path);
    if (!cfg.is_object()) throw ConfigError(inv.config_path + ": top level must be an object");
    return cfg;
}

SpinSystem system_from(const json& cfg, const std::string& context) {
    if (cfg.contains("preset") && cfg.contains("system"))
        throw ConfigError(context + ": give either 'preset' or 'system', not both");
    if (cfg.contains("preset")) return preset_by_name(cfg.at("preset").get<std::string>());
    if (cfg.contains("system")) return spin_system_from_json(cfg.at("system"));
    throw ConfigError(context + ": missing key 'preset' or 'system'");
}

AcquisitionConfig acquisition_from(const json& j) {
    require_keys(j, {"observe_spin", "n_points", "dwell_s", "v0", "line_broadening_hz", "first_point_scale"},
                 "acquisition");
    AcquisitionConfig a;
    a.observe_spin = j.value("observe_spin", a.observe_spin);
    a.n_points = j.value("n_points", a.n_points);
    a.dwell_s = j.value("dwell_s", a.dwell_s);
    a.v0 = j.value("v0", a.v0);
    a.line_broadening_hz = j.value("line_broadening_hz", a.line_broadening_hz);
    a.first_point_scale = j.value("first_point_scale", a.first_point_scale);
    if (a.n_points < 2 || !(a.dwell_s > 0.0)) throw ConfigError("acquisition: need n_points >= 2 and dwell_s > 0");
    return a;
}

json acquisition_json(const AcquisitionConfig& a) {
    return {{"observe_spin", a.observe_spin}, {"n_points", a.n_points}, {"dwell_s", a.dwell_s},
            {"v0", a.v0}, {"line_broadening_hz", a.line_broadening_hz}, {"first_point_scale", a.first_point_scale}};
}

std::string spectrum_csv(const Spectrum& s) {
    std::string out = "freq_hz,re,im\n";
    for (std::size_t m = 0; m < s.values.size(); ++m)
        out += format_double(s.frequencies_hz[m]) + "," + format_double(s.values[m].real()) + "," +
               format_double(s.values[m].imag()) + "\n";
    return out;
}

json spectrum_summary(const Spectrum& s) {
    return {{"peaks_hz", find_peaks(s, 10.0)}, {"zero_order_phase_rad", zero_order_phase(s)}};
}

int cmd_list() {
    std::cout << "experiments:\n";
    for (const auto& n : experiment_names()) std::cout << "  " << n << "\n";
    std::cout << "presets:\n";
    for (const auto& n : preset_names()) std::cout << "  " << n << "\n";
    return kExitOk;
}

int cmd_run(const CliInvocation& inv) {
    json cfg = load_config(inv);
    require_keys(cfg, {"name", "seed", "params"}, "run config");
    ExperimentConfig ec;
    ec.name = inv.name.empty() ? cfg.value("name", std::string()) : inv.name;
    if (ec.name.empty()) throw ConfigError("run: missing experiment name (--name or config key 'name')");
    ec.params = cfg.value("params", json::object());
    for (const auto& o : inv.overrides) apply_override(ec.params, o);
    ec.seed = inv.seed ? *inv.seed : cfg.value("seed", std::uint64_t{0});
    const ExperimentResult r = run_experiment(ec);
    write_result(r, inv.out_dir);
    std::cerr << "run " << ec.name << ": wrote " << inv.out_dir << "\n";
    return kExitOk;
}

int cmd_simulate(const CliInvocation& inv) {
    json cfg = load_config(inv);
    for (const auto& o : inv.overrides) apply_override(cfg, o);
    require_keys(cfg, {"preset", "system", "program", "initial_state", "mode", "finite_amplitude_hz", "ensemble",
                       "acquisition", "seed"},
                 "simulate config");
    const SpinSystem sys = system_from(cfg, "simulate config");
    if (!cfg.contains("program")) throw ConfigError("simulate config: missing key 'program'");
    const PulseProgram prog = program_from_json(cfg.at("program"));
    prog.validate(sys.n_spins());
    RunOptions opts;
    const std::string mode = cfg.value("mode", std::string("ideal"));
    if (mode == "finite") opts.mode = PulseMode::finite_pulses;
    else if (mode != "ideal") throw ConfigError("simulate config: mode must be 'ideal' or 'finite'");
    opts.finite_amplitude_hz = cfg.value("finite_amplitude_hz", opts.finite_amplitude_hz);

    StateMatrix rho0;
    const json init = cfg.value("initial_state", json("thermal"));
    if (init.is_string() && init.get<std::string>() == "thermal") {
        rho0 = thermal_state(sys, default_thermal_params(sys), ThermalMode::high_temperature);
    } else if (init.is_object() && init.contains("diagonal")) {
        require_keys(init, {"diagonal"}, "initial_state");
        const auto d = init.at("diagonal").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(d.size()) != sys.dim()) throw ConfigError("initial_state.diagonal has wrong size");
        rho0 = StateMatrix{Operator::Zero(sys.dim(), sys.dim()), Purity::mixed};
        for (std::size_t i = 0; i < d.size(); ++i) rho0.rho(i, i) = d[i];
    } else {
        throw ConfigError("initial_state must be \"thermal\" or {\"diagonal\": [...]}");
    }
    validate_state(rho0);

    const EnsembleSpec ens = cfg.contains("ensemble") ? ensemble_from_json(cfg.at("ensemble")) : EnsembleSpec::singleton();
    const StateMatrix out = run_ensemble(prog, sys, rho0, ens, opts);
    const AcquisitionConfig acq = acquisition_from(cfg.value("acquisition", json::object()));
    if (acq.observe_spin < 0 || acq.observe_spin >= sys.n_spins()) throw ConfigError("acquisition.observe_spin out of range");
    const auto fid = acquire_fid(out.rho, internal_hamiltonian(sys), acq);
    const Spectrum s = spectrum(fid, acq);

    std::filesystem::create_directories(inv.out_dir);
    std::string fcsv = "t_s,re,im\n";
    for (std::size_t i = 0; i < fid.size(); ++i)
        fcsv += format_double(i * acq.dwell_s) + "," + format_double(fid[i].real()) + "," + format_double(fid[i].imag()) + "\n";
    write_text_file(inv.out_dir + "/fid.csv", fcsv);
    write_text_file(inv.out_dir + "/spectrum.csv", spectrum_csv(s));
    json resolved = cfg;
    resolved["acquisition"] = acquisition_json(acq);
    write_text_file(inv.out_dir + "/config.json", resolved.dump(2) + "\n");
    json res = spectrum_summary(s);
    res["command"] = "simulate";
    write_text_file(inv.out_dir + "/result.json", res.dump(2) + "\n");
    std::cerr << "simulate: wrote " << inv.out_dir << "\n";
    return kExitOk;
}

int cmd_optimize(const CliInvocation& inv) {
    json cfg = load_config(inv);
    for (const auto& o : inv.overrides) apply_override(cfg, o);
    require_keys(cfg, {"preset", "system", "target", "amplitude_cap_hz", "n_segments", "ensemble", "restarts",
                       "max_evals", "tolerance", "seed"},
                 "optimize-pulse config");
    const SpinSystem sys = system_from(cfg, "optimize-pulse config");
    if (!cfg.contains("target")) throw ConfigError("optimize-pulse config: missing key 'target'");
    const json& t = cfg.at("target");
    require_keys(t, {"axis", "angle_rad", "spin"}, "target");
    const std::string axis = t.value("axis", std::string("x"));
    if (axis.size() != 1) throw ConfigError("target.axis must be x, y or z");
    const int spin = t.value("spin", 0);
    if (spin < 0 || spin >= sys.n_spins()) throw ConfigError("target.spin out of range");
    const Operator target = rotation_propagator(RotationSpec::about(axis[0], t.value("angle_rad", kPi / 2.0), spin),
                                                sys.n_spins());
    SmpOptions so;
    so.restarts = cfg.value("restarts", so.restarts);
    so.max_evals = cfg.value("max_evals", so.max_evals);
    so.tolerance = cfg.value("tolerance", so.tolerance);
    const EnsembleSpec ens = cfg.contains("ensemble") ? ensemble_from_json(cfg.at("ensemble")) : EnsembleSpec::singleton();
    const std::uint64_t seed = inv.seed ? *inv.seed : cfg.value("seed", std::uint64_t{0});
    const SmpResult r = smp_optimize(target, sys, ens, cfg.value("amplitude_cap_hz", 20e3), cfg.value("n_segments", 6),
                                     seed, so);
    std::filesystem::create_directories(inv.out_dir);
    json pulse = to_json(r.segments);
    pulse["fidelity"] = r.fidelity;
    write_text_file(inv.out_dir + "/pulse.json", pulse.dump(2) + "\n");
    json resolved = cfg;
    resolved["seed"] = seed;
    write_text_file(inv.out_dir + "/config.json", resolved.dump(2) + "\n");
    const json res = {{"command", "optimize-pulse"},
                      {"fidelity", r.fidelity},
                      {"evaluations", r.evaluations},
                      {"restart_fidelities", r.restart_fidelities},
                      {"seed", seed}};
    write_text_file(inv.out_dir + "/result.json", res.dump(2) + "\n");
    std::cerr << "optimize-pulse: fidelity " << format_double(r.fidelity) << "\n";
    return kExitOk;
}

int cmd_spectrum(const CliInvocation& inv) {
    json cfg = load_config(inv);
    for (const auto& o : inv.overrides) apply_override(cfg, o);
    require_keys(cfg, {"fid_csv", "line_broadening_hz", "first_point_scale", "dwell_s"}, "spectrum config");
    if (!cfg.contains("fid_csv")) throw ConfigError("spectrum config: missing key 'fid_csv'");
    std::string path = cfg.at("fid_csv").get<std::string>();
    if (std::filesystem::path(path).is_relative() && !inv.config_path.empty())
        path = (std::filesystem::path(inv.config_path).parent_path() / path).string();
    std::ifstream in(path);
    if (!in) throw ConfigError("spectrum config: cannot open fid_csv '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != "t_s,re,im") throw ConfigError(path + ": expected header t_s,re,im");
    std::vector<double> ts;
    std::vector<cd> fid;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        try {
            ts.push_back(std::stod(a));
            fid.emplace_back(std::stod(b), std::stod(c));
        } catch (const std::exception&) {
            throw ConfigError(path + ": malformed row '" + line + "'");
        }
    }
    if (fid.size() < 2) throw ConfigError(path + ": need at least two samples");
    AcquisitionConfig acq;
    acq.n_points = static_cast<int>(fid.size());
    acq.dwell_s = cfg.value("dwell_s", ts[1] - ts[0]);
    acq.first_point_scale = cfg.value("first_point_scale", acq.first_point_scale);
    const double lb = cfg.value("line_broadening_hz", 0.0);
    // Extra broadening on top of whatever the stored FID carries.
    for (std::size_t i = 0; i < fid.size(); ++i) fid[i] *= std::exp(-kPi * lb * ts[i]);
    const Spectrum s = spectrum(fid, acq);
    std::filesystem::create_directories(inv.out_dir);
    write_text_file(inv.out_dir + "/spectrum.csv", spectrum_csv(s));
    write_text_file(inv.out_dir + "/config.json", cfg.dump(2) + "\n");
    json res = spectrum_summary(s);
    res["command"] = "spectrum";
    write_text_file(inv.out_dir + "/result.json", res.dump(2) + "\n");
    std::cerr << "spectrum: wrote " << inv.out_dir << "\n";
    return kExitOk;
}

}  // namespace

int dispatch(const CliInvocation& inv) {
    try {
        if (inv.threads > 0) set_thread_count(inv.threads);
        if (inv.subcommand == "list") return cmd_list();
        if (inv.subcommand == "run") return cmd_run(inv);
        if (inv.subcommand == "simulate") return cmd_simulate(inv);
        if (inv.subcommand == "optimize-pulse") return cmd_optimize(inv);
        if (inv.subcommand == "spectrum") return cmd_spectrum(inv);
        throw ConfigError("unknown subcommand '" + inv.subcommand + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"nmrsim: NMR quantum information simulator"};
    app.require_subcommand(1);
    CliInvocation inv;
    std::uint64_t seed = 0;
    std::vector<CLI::Option*> seed_opts;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "JSON config file");
        sub->add_option("--set", inv.overrides, "Override key=value (dotted keys for nesting)");
        seed_opts.push_back(sub->add_option("--seed", seed, "Random seed"));
        sub->add_option("--out", inv.out_dir, "Output directory");
        sub->add_option("--threads", inv.threads, "Worker threads (default NMRSIM_THREADS or all cores)");
    };
    CLI::App* run = app.add_subcommand("run", "Run a registered experiment");
    run->add_option("--name", inv.name, "Experiment name");
    common(run);
    common(app.add_subcommand("simulate", "Run a pulse program and acquire FID and spectrum"));
    common(app.add_subcommand("optimize-pulse", "Optimize a strongly modulated pulse"));
    common(app.add_subcommand("spectrum", "Recompute a spectrum from a stored FID"));
    app.add_subcommand("list", "List experiments and presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return kExitConfig;
    }
    inv.subcommand = app.get_subcommands().front()->get_name();
    for (const auto* opt : seed_opts)
        if (opt->count() > 0) inv.seed = seed;
    return dispatch(inv);
}

}  // namespace nmrqip
