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

#include "nmrqip/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nmrqip {

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& [k, v] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError(context + ": unknown key '" + k + "'");
}

namespace {

template <class T>
T get_required(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(context + ": bad value for '" + key + "': " + e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& context) {
    if (!j.contains(key)) return fallback;
    return get_required<T>(j, key, context);
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j, int n, const std::string& context) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) throw ConfigError(context + " must have " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
            throw ConfigError(context + " row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) {
            if (!j[r][c].is_number()) throw ConfigError(context + " entries must be numbers");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

}  // namespace

json to_json(const SpinSystem& s) {
    json j;
    json spins = json::array();
    for (int k = 0; k < s.n_spins(); ++k) {
        const std::string label = k < static_cast<int>(s.labels.size()) ? s.labels[k] : "S" + std::to_string(k);
        spins.push_back({{"label", label}, {"offset_hz", s.offsets_hz[k]}});
    }
    j["spins"] = spins;
    j["j_hz"] = matrix_json(s.j_hz);
    if (s.d_hz) j["d_hz"] = matrix_json(*s.d_hz);
    j["model"] = to_string(s.model);
    return j;
}

SpinSystem spin_system_from_json(const json& j) {
    const std::string ctx = "spin system";
    require_keys(j, {"spins", "j_hz", "d_hz", "model"}, ctx);
    if (!j.contains("spins") || !j["spins"].is_array() || j["spins"].empty())
        throw ConfigError(ctx + ": missing key 'spins'");
    SpinSystem s;
    for (const auto& sp : j["spins"]) {
        require_keys(sp, {"label", "offset_hz"}, ctx + " spin");
        s.labels.push_back(get_or<std::string>(sp, "label", "S" + std::to_string(s.labels.size()), ctx));
        s.offsets_hz.push_back(get_required<double>(sp, "offset_hz", ctx + " spin"));
    }
    const int n = s.n_spins();
    s.j_hz = j.contains("j_hz") ? matrix_from(j["j_hz"], n, "j_hz") : Eigen::MatrixXd::Zero(n, n);
    if (j.contains("d_hz")) s.d_hz = matrix_from(j["d_hz"], n, "d_hz");
    s.model = coupling_model_from_string(get_or<std::string>(j, "model", "weak_j", ctx));
    s.validate();
    return s;
}

json to_json(const PulseSegment& s) {
    json j{{"amplitude_hz", s.amplitude_hz},
           {"phase_rad", s.phase_rad},
           {"transmitter_offset_hz", s.transmitter_offset_hz},
           {"duration_s", s.duration_s}};
    if (!s.targets.empty()) j["targets"] = s.targets;
    return j;
}

PulseSegment segment_from_json(const json& j) {
    const std::string ctx = "pulse segment";
    require_keys(j, {"amplitude_hz", "phase_rad", "transmitter_offset_hz", "duration_s", "targets"}, ctx);
    PulseSegment s;
    s.amplitude_hz = get_required<double>(j, "amplitude_hz", ctx);
    s.phase_rad = get_or<double>(j, "phase_rad", 0.0, ctx);
    s.transmitter_offset_hz = get_or<double>(j, "transmitter_offset_hz", 0.0, ctx);
    s.duration_s = get_required<double>(j, "duration_s", ctx);
    s.targets = get_or<std::vector<int>>(j, "targets", {}, ctx);
    if (s.amplitude_hz < 0.0 || !(s.duration_s > 0.0)) throw ConfigError(ctx + ": amplitude >= 0 and duration > 0 required");
    return s;
}

json to_json(const std::vector<PulseSegment>& segs) {
    json arr = json::array();
    for (const auto& s : segs) arr.push_back(to_json(s));
    return json{{"segments", arr}};
}

std::vector<PulseSegment> segments_from_json(const json& j) {
    require_keys(j, {"segments", "fidelity"}, "segment list");
    if (!j.contains("segments") || !j["segments"].is_array()) throw ConfigError("segment list: missing key 'segments'");
    std::vector<PulseSegment> out;
    for (const auto& s : j["segments"]) out.push_back(segment_from_json(s));
    return out;
}

json to_json(const PulseProgram& p) {
    json events = json::array();
    for (const auto& ev : p.events) {
        if (const auto* d = std::get_if<DelayEvent>(&ev)) {
            events.push_back({{"type", "delay"}, {"duration_s", d->duration_s}});
        } else if (const auto* f = std::get_if<FrameZEvent>(&ev)) {
            events.push_back({{"type", "framez"}, {"spin", f->spin}, {"angle_rad", f->angle_rad}});
        } else {
            const auto& pulse = std::get<PulseEvent>(ev).pulse;
            if (const auto* s = std::get_if<PulseSegment>(&pulse)) {
                events.push_back({{"type", "pulse"}, {"segment", to_json(*s)}});
            } else {
                const auto& r = std::get<RotationSpec>(pulse);
                json rj{{"axis", {r.axis.x(), r.axis.y(), r.axis.z()}}, {"angle_rad", r.angle_rad}};
                if (r.spin) rj["spin"] = *r.spin;
                if (r.amplitude_error != 0.0) rj["amplitude_error"] = r.amplitude_error;
                events.push_back({{"type", "pulse"}, {"rotation", rj}});
            }
        }
    }
    return json{{"events", events}};
}

PulseProgram program_from_json(const json& j) {
    require_keys(j, {"events"}, "pulse program");
    if (!j.contains("events") || !j["events"].is_array()) throw ConfigError("pulse program: missing key 'events'");
    PulseProgram p;
    for (const auto& e : j["events"]) {
        const std::string type = get_required<std::string>(e, "type", "program event");
        if (type == "delay") {
            require_keys(e, {"type", "duration_s"}, "delay event");
            p.events.push_back(DelayEvent{get_required<double>(e, "duration_s", "delay event")});
        } else if (type == "framez") {
            require_keys(e, {"type", "spin", "angle_rad"}, "framez event");
            p.events.push_back(FrameZEvent{get_required<int>(e, "spin", "framez event"),
                                           get_required<double>(e, "angle_rad", "framez event")});
        } else if (type == "pulse") {
            require_keys(e, {"type", "segment", "rotation"}, "pulse event");
            if (e.contains("segment") == e.contains("rotation"))
                throw ConfigError("pulse event: give exactly one of 'segment' or 'rotation'");
            if (e.contains("segment")) {
                p.events.push_back(PulseEvent{segment_from_json(e["segment"])});
            } else {
                const auto& rj = e["rotation"];
                require_keys(rj, {"axis", "angle_rad", "spin", "amplitude_error"}, "rotation");
                RotationSpec r;
                const auto ax = get_required<std::vector<double>>(rj, "axis", "rotation");
                if (ax.size() != 3) throw ConfigError("rotation: axis must have 3 components");
                r.axis = Eigen::Vector3d(ax[0], ax[1], ax[2]);
                r.angle_rad = get_required<double>(rj, "angle_rad", "rotation");
                if (rj.contains("spin")) r.spin = get_required<int>(rj, "spin", "rotation");
                r.amplitude_error = get_or<double>(rj, "amplitude_error", 0.0, "rotation");
                p.events.push_back(PulseEvent{r});
            }
        } else {
            throw ConfigError("program event: unknown type '" + type + "'");
        }
    }
    return p;
}

json to_json(const EnsembleSpec& e) {
    json arr = json::array();
    for (const auto& m : e.members)
        arr.push_back({{"rf_scale", m.rf_scale}, {"b0_offset_hz", m.b0_offset_hz}, {"weight", m.weight}});
    return json{{"members", arr}};
}

EnsembleSpec ensemble_from_json(const json& j) {
    require_keys(j, {"members"}, "ensemble");
    EnsembleSpec e;
    for (const auto& m : get_required<json>(j, "members", "ensemble")) {
        require_keys(m, {"rf_scale", "b0_offset_hz", "weight"}, "ensemble member");
        e.members.push_back({get_or<double>(m, "rf_scale", 1.0, "ensemble member"),
                             get_or<double>(m, "b0_offset_hz", 0.0, "ensemble member"),
                             get_required<double>(m, "weight", "ensemble member")});
    }
    e.validate();
    return e;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace nmrqip
