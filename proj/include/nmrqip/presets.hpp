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

#pragma once

#include <string>
#include <vector>

#include "nmrqip/spin_system.hpp"

namespace nmrqip {

// Heteronuclear 1H-13C pair (chloroform-like), weak coupling.
SpinSystem preset_chloroform();
SpinSystem preset_three_spin();
// Generic five-spin weak_j molecule; every spin shows 16 resolved lines.
SpinSystem preset_five_spin();
// Seven-spin factoring molecule: five 19F and two 13C. Representative values;
// spin 0 (F1) shows 64 resolved lines.
SpinSystem preset_shor7();
// Linear chain with d_ij = d_nn / |i-j|^3 under the truncated dipolar model.
SpinSystem preset_dipolar_chain(int n_spins, double d_nn_hz = 5000.0);

std::vector<std::string> preset_names();
SpinSystem preset_by_name(const std::string& name);

}  // namespace nmrqip
