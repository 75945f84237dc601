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

#include "nmrqip/presets.hpp"

#include <cmath>

namespace nmrqip {

SpinSystem preset_chloroform() {
    SpinSystem s = SpinSystem::uncoupled({150.0, -80.0});
    s.labels = {"H", "C"};
    s.set_j(0, 1, 215.0);
    return s;
}

SpinSystem preset_three_spin() {
    SpinSystem s = SpinSystem::uncoupled({120.0, -340.0, 560.0});
    s.labels = {"C1", "C2", "C3"};
    s.set_j(0, 1, 54.0);
    s.set_j(0, 2, -13.5);
    s.set_j(1, 2, 35.0);
    return s;
}

SpinSystem preset_five_spin() {
    SpinSystem s = SpinSystem::uncoupled({2100.0, -1450.0, 780.0, -3120.0, 4260.0});
    s.labels = {"F1", "F2", "F3", "F4", "F5"};
    s.set_j(0, 1, -186.4);
    s.set_j(0, 2, 27.3);
    s.set_j(0, 3, 5.9);
    s.set_j(0, 4, -72.8);
    s.set_j(1, 2, -9.7);
    s.set_j(1, 3, 41.2);
    s.set_j(1, 4, 14.6);
    s.set_j(2, 3, -132.5);
    s.set_j(2, 4, 3.8);
    s.set_j(3, 4, 21.1);
    return s;
}

SpinSystem preset_shor7() {
    SpinSystem s = SpinSystem::uncoupled({3000.0, -4200.0, 8100.0, -10500.0, 12200.0, -1500.0, 600.0});
    s.labels = {"F1", "F2", "F3", "F4", "F5", "C1", "C2"};
    const double j[7][7] = {
        {0, -220.3, 43.9, 5.3, -113.6, -11.2, 22.5},
        {0, 0, -3.9, 2.5, 79.9, -33.4, -41.9},
        {0, 0, 0, 14.5, -11.7, -19.5, 59.5},
        {0, 0, 0, 0, -4.9, 68.9, -29.2},
        {0, 0, 0, 0, 0, -7.0, 12.3},
        {0, 0, 0, 0, 0, 0, -47.7},
        {0, 0, 0, 0, 0, 0, 0},
    };
    for (int a = 0; a < 7; ++a)
        for (int b = a + 1; b < 7; ++b) s.set_j(a, b, j[a][b]);
    return s;
}

SpinSystem preset_dipolar_chain(int n_spins, double d_nn_hz) {
    if (n_spins < 2 || n_spins > kMaxSpins) throw ConfigError("dipolar chain needs 2..10 spins");
    SpinSystem s = SpinSystem::uncoupled(std::vector<double>(n_spins, 0.0), CouplingModel::dipolar_truncated);
    for (int a = 0; a < n_spins; ++a) s.labels[a] = "F" + std::to_string(a + 1);
    for (int a = 0; a < n_spins; ++a)
        for (int b = a + 1; b < n_spins; ++b) s.set_d(a, b, d_nn_hz / std::pow(b - a, 3));
    return s;
}

std::vector<std::string> preset_names() {
    return {"chloroform", "three_spin", "five_spin", "shor7", "dipolar_chain6"};
}

SpinSystem preset_by_name(const std::string& name) {
    if (name == "chloroform") return preset_chloroform();
    if (name == "three_spin") return preset_three_spin();
    if (name == "five_spin") return preset_five_spin();
    if (name == "shor7") return preset_shor7();
    if (name.rfind("dipolar_chain", 0) == 0) {
        const std::string tail = name.substr(13);
        int n = 6;
        if (!tail.empty()) {
            try {
                n = std::stoi(tail);
            } catch (...) {
                throw ConfigError("unknown preset '" + name + "'");
            }
        }
        return preset_dipolar_chain(n);
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace nmrqip
