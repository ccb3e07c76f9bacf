// Copyright 2026 The cornerdtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "cornerdtc/io.hpp"

namespace cornerdtc::presets {

struct Preset {
    std::string name;
    std::string config;
};

inline const char *kTwelve = "[lattice]\nblue = 2 3\nred = 2 3\noffset = 0.5 0.5\n\n";
inline const char *kEight = "[lattice]\nblue = 2 2\nred = 2 2\noffset = 0.5 0.5\n\n";

inline std::string figure1_protocol(const std::string &omega) {
    return "[protocol]\nJ_r = 1\nJ_b = 1\nepsilon = 0.05\nh_x = 0.21\nh_y = 0.17\nh_z = 0.19\n"
           "V_xx = 0.31\nV_zz = 0.15\nOmega = " +
           omega + "\n\n";
}

/// Corner autocorrelators and heating at a slow and a fast drive.
inline std::vector<Preset> fig1b() {
    std::vector<Preset> out;
    for (const char *w : {"1", "4", "12"}) {
        out.push_back({std::string("omega_") + w,
                       kTwelve + figure1_protocol(w) +
                           "[experiment]\nkind = dynamics\ninitial = ground\n"
                           "observables = z_tilde, x_tilde, energy\nn_max = 400\n"});
    }
    return out;
}

/// Lifetime against drive frequency on two sizes.
inline std::vector<Preset> fig1d() {
    const std::string sweep =
        "[experiment]\nkind = frequency-sweep\ninitial = ground\nobservables = z_tilde\n"
        "omegas = 1 2 4 6 8 12\nn_max = 3000\n";
    return {{"eight_sites", kEight + figure1_protocol("4") + sweep},
            {"twelve_sites", kTwelve + figure1_protocol("4") + sweep}};
}

/// Order parameters along V_zz and V_xx at h_x = eps = 0.
inline std::vector<Preset> fig2ab() {
    auto grid = [](int lo, int hi) {
        std::string s;
        for (int k = lo; k <= hi; ++k) s += (s.empty() ? "" : " ") + format_real(k / 10.0);
        return s;
    };
    return {{"vzz", kTwelve + figure1_protocol("4") + "[experiment]\nkind = phase-scan\nscan = V_zz\ngrid = " +
                        grid(-20, 20) + "\n"},
            {"vxx", std::string(kTwelve) +
                        "[protocol]\nV_zz = 0.5\n\n[experiment]\nkind = phase-scan\nscan = V_xx\ngrid = " +
                        grid(0, 20) + "\n"}};
}

/// Corner and bulk lifetimes against dimerization from the all-up state.
inline std::vector<Preset> fig3ab() {
    return {{"eta_scan", std::string(kTwelve) +
                             "[protocol]\nJ_b = 1\nJ_r = 1\nV_xx = 0.11\nV_zz = 0.05\nh_x = 0.11\nOmega = 20\n\n"
                             "[experiment]\nkind = dimerization-sweep\ninitial = all-up\n"
                             "etas = 1 1.5 2 2.5 3 3.5 4 5.11\nn_max = 20000\n"}};
}

}  // namespace cornerdtc::presets
