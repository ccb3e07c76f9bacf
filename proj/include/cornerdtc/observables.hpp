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

#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cornerdtc/engine.hpp"
#include "cornerdtc/io.hpp"
#include "cornerdtc/model.hpp"

namespace cornerdtc {

/// One real value per Floquet period n = 0..n_max.
struct TimeSeries {
    std::string label;
    std::vector<double> values;
    std::vector<double> imag_residuals;
    double period = 0;
    FloquetProtocol protocol;

    size_t n_max() const {
        return values.empty() ? 0 : values.size() - 1;
    }
    double time(size_t n) const {
        return static_cast<double>(n) * period;
    }
};

/// Canonical key=value listing of every protocol field.
inline std::string protocol_text(const FloquetProtocol &p) {
    std::ostringstream s;
    s << "J_r=" << format_real(p.J_r) << "\n"
      << "J_b=" << format_real(p.J_b) << "\n"
      << "epsilon=" << format_real(p.epsilon) << "\n"
      << "h_x=" << format_real(p.h_x) << "\n"
      << "h_y=" << format_real(p.h_y) << "\n"
      << "h_z=" << format_real(p.h_z) << "\n"
      << "V_xx=" << format_real(p.V_xx) << "\n"
      << "V_zz=" << format_real(p.V_zz) << "\n"
      << "Omega=" << format_real(p.Omega) << "\n"
      << "include_corner_K1=" << (p.include_corner_K1 ? "true" : "false") << "\n";
    return s.str();
}

inline std::string protocol_fingerprint(const FloquetProtocol &p) {
    return hex64(fnv1a64(protocol_text(p)));
}

struct LabeledObservable {
    std::string label;
    PauliString op;
};

struct TrajectoryResult {
    std::vector<TimeSeries> autocorrelations;
    std::vector<TimeSeries> expectations;
};

struct TrajectoryOptions {
    KrylovOptions krylov;
    /// Called with the last recorded period; returning false stops the run
    /// early (the series are then shorter than n_max + 1).
    std::function<bool(size_t n, const TrajectoryResult &)> keep_going;
    /// Sees the forward state after each recorded period.
    std::function<void(size_t n, const StateVector &psi)> on_state;
};

/// Evolves `initial` by the Floquet drive and records, per period,
///   Re <psi(nT)| O |phi_O(nT)>   with phi_O(0) = O psi(0)      (autocorrelations)
///   <psi(nT)| A |psi(nT)>                                       (expectations)
/// When O psi(0) = +-psi(0) the extra trajectory is skipped.
inline TrajectoryResult run_trajectory(const Lattice &L, const FloquetProtocol &p, const StateVector &initial,
                                       const std::vector<LabeledObservable> &autocorrelated,
                                       const std::vector<LabeledObservable> &measured, size_t n_max,
                                       const TrajectoryOptions &opt = {}) {
    if (initial.num_qubits() != L.num_sites()) throw DimensionMismatch("initial state does not match the lattice");
    for (const auto *group : {&autocorrelated, &measured}) {
        for (const auto &o : *group) {
            if (o.op.num_sites() != L.num_sites()) throw DimensionMismatch("observable does not match the lattice");
            if (!o.op.is_hermitian()) throw NonHermitianResidual("observable " + o.label + " is not Hermitian");
        }
    }
    FloquetEvolver evo(L, p, opt.krylov);
    StateVector psi = initial;

    struct Partner {
        size_t index;
        bool shares_psi;
        double sign;
        StateVector phi;
    };
    std::vector<Partner> partners;
    TrajectoryResult out;
    auto make_series = [&](const std::string &label) {
        TimeSeries ts;
        ts.label = label;
        ts.period = p.period();
        ts.protocol = p;
        ts.values.reserve(n_max + 1);
        ts.imag_residuals.reserve(n_max + 1);
        return ts;
    };
    for (size_t k = 0; k < autocorrelated.size(); ++k) {
        out.autocorrelations.push_back(make_series(autocorrelated[k].label));
        StateVector phi = apply(autocorrelated[k].op, psi);
        cd overlap = psi.inner(phi);
        if (std::abs(std::abs(overlap) - 1.0) < 1e-12 && std::abs(overlap.imag()) < 1e-12) {
            partners.push_back({k, true, overlap.real() > 0 ? 1.0 : -1.0, StateVector::zeros(0)});
        } else {
            partners.push_back({k, false, 1.0, std::move(phi)});
        }
    }
    for (const auto &m : measured) out.expectations.push_back(make_series(m.label));

    auto record = [&](size_t n) {
        if (opt.on_state) opt.on_state(n, psi);
        for (auto &pt : partners) {
            const PauliString &O = autocorrelated[pt.index].op;
            cd c = pt.shares_psi ? pt.sign * psi.inner(apply(O, psi)) : psi.inner(apply(O, pt.phi));
            out.autocorrelations[pt.index].values.push_back(c.real());
            out.autocorrelations[pt.index].imag_residuals.push_back(c.imag());
        }
        for (size_t k = 0; k < measured.size(); ++k) {
            cd c = psi.inner(apply(measured[k].op, psi));
            out.expectations[k].values.push_back(c.real());
            out.expectations[k].imag_residuals.push_back(c.imag());
        }
    };

    record(0);
    for (size_t n = 1; n <= n_max; ++n) {
        if (opt.keep_going && !opt.keep_going(n - 1, out)) break;
        evo.step(psi);
        for (auto &pt : partners) {
            if (!pt.shares_psi) evo.step(pt.phi);
        }
        record(n);
    }
    return out;
}

/// C(O, nT) = Re <psi| O(nT) O(0) |psi>, by the two-state method.
inline TimeSeries autocorrelation(const Lattice &L, const FloquetProtocol &p, const StateVector &initial,
                                  const PauliString &O, size_t n_max, const TrajectoryOptions &opt = {}) {
    return run_trajectory(L, p, initial, {{O.str(), O}}, {}, n_max, opt).autocorrelations.front();
}

inline std::vector<TimeSeries> autocorrelations(const Lattice &L, const FloquetProtocol &p, const StateVector &initial,
                                                const std::vector<LabeledObservable> &ops, size_t n_max,
                                                const TrajectoryOptions &opt = {}) {
    return run_trajectory(L, p, initial, ops, {}, n_max, opt).autocorrelations;
}

inline std::vector<TimeSeries> expectation_series(const Lattice &L, const FloquetProtocol &p,
                                                  const StateVector &initial, const std::vector<LabeledObservable> &ops,
                                                  size_t n_max, const TrajectoryOptions &opt = {}) {
    return run_trajectory(L, p, initial, {}, ops, n_max, opt).expectations;
}

/// 2 H_eff and its ground energy, the reference points of the energy density.
struct EnergyScale {
    OperatorSum heff;
    double ground_energy;
};

inline EnergyScale energy_scale(const Lattice &L, const FloquetProtocol &p, const EigenOptions &opt = {}) {
    auto h = build_heff(L, p);
    double e0 = ground_state(h, 1, opt).values.front();
    return {std::move(h), e0};
}

/// Heating fraction (<H_eff> - E0) / (0 - E0): 0 in the ground state, 1 at
/// infinite temperature (H_eff is traceless).
inline double energy_density(const EnergyScale &scale, const StateVector &state) {
    if (scale.ground_energy >= 0) throw Error("energy density needs a negative ground energy");
    return (expectation(scale.heff, state) - scale.ground_energy) / (0 - scale.ground_energy);
}

inline double energy_density(const Lattice &L, const FloquetProtocol &p, const StateVector &state) {
    return energy_density(energy_scale(L, p), state);
}

/// The three order-parameter strings.
struct OrderParameterOperators {
    PauliString membrane;  // product of K_i over red non-corner sites
    PauliString zz;        // Z on the blue corner and on the blue neighbour of the red corner
    PauliString xx;        // X on both corners
};

inline OrderParameterOperators order_parameter_operators(const Lattice &L) {
    const size_t n = L.num_sites();
    auto blue = L.corners(Color::kBlue);
    auto red = L.corners(Color::kRed);
    if (blue.empty() || red.empty()) throw NoCornerPresent("order parameters need one blue and one red corner");
    PauliString membrane(n);
    for (size_t i : L.sites_of(Color::kRed)) {
        if (!L.is_corner(i)) membrane = membrane * stabilizer_support(L, i);
    }
    const size_t partner = L.neighbors(red.front()).front();
    return {membrane, PauliString::from_sparse(n, {{blue.front(), 'Z'}, {partner, 'Z'}}),
            PauliString::from_sparse(n, {{blue.front(), 'X'}, {red.front(), 'X'}})};
}

struct OrderParameters {
    double membrane = 0;
    double zz = 0;
    double xx = 0;
    double energy = 0;
};

/// Expectations in the lowest state of the (G_b = +1, G_r = +1) sector of H.
inline OrderParameters order_parameters(const Lattice &L, const OperatorSum &H, EigenOptions opt = {}) {
    auto ops = order_parameter_operators(L);
    auto G = symmetry_generators(L);
    opt.sector = {{G.blue, 1}, {G.red, 1}};
    auto e = ground_state(H, 1, opt);
    const auto &v = e.vectors.front();
    return {expectation(ops.membrane, v), expectation(ops.zz, v), expectation(ops.xx, v), e.values.front()};
}

/// CSV text: '#' metadata lines, then n,t,value,imag_residual.
inline std::string to_csv(const TimeSeries &ts) {
    std::ostringstream s;
    s << "# label=" << ts.label << "\n";
    s << "# fingerprint=" << protocol_fingerprint(ts.protocol) << "\n";
    s << "# period=" << format_real(ts.period) << "\n";
    s << "n,t,value,imag_residual\n";
    for (size_t n = 0; n < ts.values.size(); ++n) {
        double im = n < ts.imag_residuals.size() ? ts.imag_residuals[n] : 0.0;
        s << n << "," << format_real(ts.time(n)) << "," << format_real(ts.values[n]) << "," << format_real(im)
          << "\n";
    }
    return s.str();
}

inline void write_csv(const TimeSeries &ts, const std::filesystem::path &path) {
    atomic_write(path, to_csv(ts));
}

/// Reads the label, period and rows written by to_csv. The protocol is not
/// recoverable from the fingerprint and is left at its defaults.
inline TimeSeries parse_csv(const std::string &text) {
    TimeSeries ts;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
            if (key == "label") ts.label = val;
            if (key == "period") ts.period = std::stod(val);
            continue;
        }
        if (!header) {
            if (line != "n,t,value,imag_residual") throw ParseError("unexpected CSV header: " + line);
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string f[4];
        for (auto &x : f) {
            if (!std::getline(row, x, ',')) throw ParseError("short CSV row at line " + std::to_string(lineno));
        }
        if (std::stoul(f[0]) != ts.values.size()) throw ParseError("non-consecutive period index");
        ts.values.push_back(std::stod(f[2]));
        ts.imag_residuals.push_back(std::stod(f[3]));
    }
    if (!header) throw ParseError("missing CSV header");
    return ts;
}

}  // namespace cornerdtc
