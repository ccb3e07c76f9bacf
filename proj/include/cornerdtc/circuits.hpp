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

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cornerdtc/engine.hpp"
#include "cornerdtc/io.hpp"
#include "cornerdtc/parallel.hpp"

namespace cornerdtc {

enum class GateKind { kH, kX, kRX, kRY, kRZ, kCZ, kCX };

inline const char *gate_name(GateKind k) {
    switch (k) {
        case GateKind::kH:
            return "H";
        case GateKind::kX:
            return "X";
        case GateKind::kRX:
            return "RX";
        case GateKind::kRY:
            return "RY";
        case GateKind::kRZ:
            return "RZ";
        case GateKind::kCZ:
            return "CZ";
        case GateKind::kCX:
            return "CX";
    }
    return "?";
}

/// R_a(theta) = exp(-i theta a / 2). For CX, q0 is the control.
struct Gate {
    GateKind kind = GateKind::kH;
    size_t q0 = 0;
    size_t q1 = 0;
    double angle = 0;

    bool two_qubit() const {
        return kind == GateKind::kCZ || kind == GateKind::kCX;
    }
    bool parametric() const {
        return kind == GateKind::kRX || kind == GateKind::kRY || kind == GateKind::kRZ;
    }
    bool operator==(const Gate &) const = default;

    static Gate h(size_t q) {
        return {GateKind::kH, q, q, 0};
    }
    static Gate x(size_t q) {
        return {GateKind::kX, q, q, 0};
    }
    static Gate rx(size_t q, double a) {
        return {GateKind::kRX, q, q, a};
    }
    static Gate ry(size_t q, double a) {
        return {GateKind::kRY, q, q, a};
    }
    static Gate rz(size_t q, double a) {
        return {GateKind::kRZ, q, q, a};
    }
    static Gate cz(size_t a, size_t b) {
        return {GateKind::kCZ, a, b, 0};
    }
    static Gate cx(size_t control, size_t target) {
        return {GateKind::kCX, control, target, 0};
    }
};

/// Gates grouped into layers of disjoint support. Two-qubit gates must join
/// adjacent sites of the lattice the circuit was built for.
class Circuit {
   public:
    explicit Circuit(const Lattice &L) : lattice_(L) {
    }

    const Lattice &lattice() const {
        return lattice_;
    }
    size_t num_qubits() const {
        return lattice_.num_sites();
    }
    const std::vector<std::vector<Gate>> &layers() const {
        return layers_;
    }
    size_t depth() const {
        return layers_.size();
    }
    size_t gate_count() const {
        size_t k = 0;
        for (const auto &l : layers_) k += l.size();
        return k;
    }
    size_t count(GateKind kind) const {
        size_t k = 0;
        for (const auto &l : layers_) {
            for (const auto &g : l) k += g.kind == kind;
        }
        return k;
    }
    bool empty() const {
        return layers_.empty();
    }

    /// Appends to the open layer, or opens a new one if `g` overlaps it.
    void add(const Gate &g) {
        check(g);
        if (layers_.empty() || !open_ || overlaps(layers_.back(), g)) {
            layers_.emplace_back();
            open_ = true;
        }
        layers_.back().push_back(g);
    }

    /// The next gate starts a new layer.
    void barrier() {
        open_ = false;
    }

    /// Appends every layer of `other` as-is.
    void append(const Circuit &other) {
        if (other.num_qubits() != num_qubits()) throw DimensionMismatch("circuit sizes differ");
        for (const auto &l : other.layers_) layers_.push_back(l);
        open_ = false;
    }

    /// The inverse circuit: reversed layers, negated angles.
    Circuit inverse() const {
        Circuit out(lattice_);
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
            std::vector<Gate> l(it->rbegin(), it->rend());
            for (auto &g : l) g.angle = -g.angle;
            out.layers_.push_back(std::move(l));
        }
        return out;
    }

    bool operator==(const Circuit &o) const {
        return num_qubits() == o.num_qubits() && layers_ == o.layers_;
    }

    /// Merges every run of consecutive CZ-only layers: CZs commute and square
    /// to one, so only edges used an odd number of times survive. Survivors are
    /// laid out one diagonal direction per layer.
    void cancel_cz() {
        std::vector<std::vector<Gate>> out;
        size_t i = 0;
        while (i < layers_.size()) {
            if (!cz_only(layers_[i])) {
                out.push_back(layers_[i++]);
                continue;
            }
            std::map<std::pair<size_t, size_t>, int> parity;
            for (; i < layers_.size() && cz_only(layers_[i]); ++i) {
                for (const auto &g : layers_[i]) parity[std::minmax(g.q0, g.q1)] ^= 1;
            }
            std::array<std::vector<Gate>, 4> by_dir;
            for (const auto &[e, odd] : parity) {
                if (odd) by_dir[direction(e.first, e.second)].push_back(Gate::cz(e.first, e.second));
            }
            for (auto &l : by_dir) {
                if (!l.empty()) out.push_back(std::move(l));
            }
        }
        layers_ = std::move(out);
        open_ = false;
    }

    /// Diagonal class 0..3 of a lattice bond, from the blue end's view.
    size_t direction(size_t a, size_t b) const {
        const auto &sa = lattice_.site(a), &sb = lattice_.site(b);
        const auto &blue = sa.color == Color::kBlue ? sa : sb;
        const auto &red = sa.color == Color::kBlue ? sb : sa;
        return (red.dx > blue.dx ? 1 : 0) + (red.dy > blue.dy ? 2 : 0);
    }

    /// One gate per line; "# layer" lines separate layers.
    std::string to_text() const {
        std::string s;
        for (size_t k = 0; k < layers_.size(); ++k) {
            s += "# layer " + std::to_string(k) + "\n";
            for (const auto &g : layers_[k]) {
                s += gate_name(g.kind);
                s += ' ' + std::to_string(g.q0);
                if (g.two_qubit()) s += ' ' + std::to_string(g.q1);
                if (g.parametric()) s += ' ' + format_real(g.angle);
                s += '\n';
            }
        }
        return s;
    }

    static Circuit from_text(const Lattice &L, std::string_view text) {
        Circuit c(L);
        std::istringstream in{std::string(text)};
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto fail = [&](const std::string &why) {
                return ParseError("circuit line " + std::to_string(lineno) + ": " + why);
            };
            if (line.empty()) continue;
            if (line[0] == '#') {
                if (line.rfind("# layer", 0) == 0) c.barrier();
                continue;
            }
            std::istringstream ls(line);
            std::string name;
            ls >> name;
            static const std::map<std::string, GateKind> kinds = {
                {"H", GateKind::kH},   {"X", GateKind::kX},   {"RX", GateKind::kRX}, {"RY", GateKind::kRY},
                {"RZ", GateKind::kRZ}, {"CZ", GateKind::kCZ}, {"CX", GateKind::kCX}};
            auto it = kinds.find(name);
            if (it == kinds.end()) throw fail("unknown gate '" + name + "'");
            Gate g;
            g.kind = it->second;
            long long a = -1, b = -1;
            if (!(ls >> a) || a < 0) throw fail("bad qubit index");
            g.q0 = g.q1 = static_cast<size_t>(a);
            if (g.two_qubit()) {
                if (!(ls >> b) || b < 0) throw fail("bad qubit index");
                g.q1 = static_cast<size_t>(b);
            }
            if (g.parametric()) {
                std::string tok;
                if (!(ls >> tok)) throw fail("missing angle");
                auto r = std::from_chars(tok.data(), tok.data() + tok.size(), g.angle);
                if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) throw fail("bad angle '" + tok + "'");
            }
            std::string extra;
            if (ls >> extra) throw fail("trailing text '" + extra + "'");
            c.add(g);
        }
        return c;
    }

   private:
    void check(const Gate &g) const {
        const size_t n = num_qubits();
        if (g.q0 >= n || g.q1 >= n) throw DimensionMismatch("gate qubit out of range");
        if (g.two_qubit() && (g.q0 == g.q1 || !lattice_.adjacent(g.q0, g.q1))) {
            throw NonAdjacentGate(std::string(gate_name(g.kind)) + " on non-adjacent sites " + std::to_string(g.q0) +
                                  " and " + std::to_string(g.q1));
        }
    }
    static bool overlaps(const std::vector<Gate> &layer, const Gate &g) {
        for (const auto &h : layer) {
            if (h.q0 == g.q0 || h.q0 == g.q1 || h.q1 == g.q0 || h.q1 == g.q1) return true;
        }
        return false;
    }
    static bool cz_only(const std::vector<Gate> &layer) {
        for (const auto &g : layer) {
            if (g.kind != GateKind::kCZ) return false;
        }
        return !layer.empty();
    }

    Lattice lattice_;
    std::vector<std::vector<Gate>> layers_;
    bool open_ = false;
};

enum class PulseAngle {
    kDriveConsistent,  // pi + eps T
    kReversed,       // pi - eps T
};

/// R_x on every site for the pulse half period.
inline Circuit compile_U1(const Lattice &L, const FloquetProtocol &p, PulseAngle mode = PulseAngle::kDriveConsistent) {
    p.validate();
    const double et = p.epsilon * p.period();
    const double angle = mode == PulseAngle::kDriveConsistent ? std::numbers::pi + et : std::numbers::pi - et;
    Circuit c(L);
    for (size_t i = 0; i < L.num_sites(); ++i) c.add(Gate::rx(i, angle));
    return c;
}

namespace detail {

/// CZ fans of the given stabilizer sites around one R_x layer.
inline Circuit stabilizer_block(const Lattice &L, const std::vector<std::pair<size_t, double>> &sites_and_angles) {
    Circuit fan(L);
    std::array<std::vector<Gate>, 4> by_dir;
    for (auto [k, a] : sites_and_angles) {
        for (size_t j : L.neighbors(k)) by_dir[fan.direction(j, k)].push_back(Gate::cz(j, k));
    }
    for (const auto &l : by_dir) {
        if (l.empty()) continue;
        fan.barrier();
        for (const auto &g : l) fan.add(g);
    }
    Circuit c(L);
    c.append(fan);
    c.barrier();
    for (auto [k, a] : sites_and_angles) c.add(Gate::rx(k, a));
    c.append(fan.inverse());
    return c;
}

}  // namespace detail

/// exp(-i dt sum J K_k) as CZ-conjugated R_x blocks, blue sublattice then red,
/// with the CZs between the two blocks cancelled.
inline Circuit compile_U2(const Lattice &L, const FloquetProtocol &p, double dt) {
    p.validate();
    if (!(dt > 0)) throw Error("dt must be positive");
    std::vector<std::pair<size_t, double>> blue, red;
    for (size_t k : L.non_corner_sites()) {
        (L.color(k) == Color::kBlue ? blue : red).emplace_back(k, 2 * p.J(L.color(k)) * dt);
    }
    if (p.include_corner_K1) {
        auto bc = L.corners(Color::kBlue);
        if (!bc.empty()) blue.insert(blue.begin(), {bc.front(), 2 * p.J_b * dt});
    }
    Circuit c(L);
    if (!blue.empty()) c.append(detail::stabilizer_block(L, blue));
    if (!red.empty()) c.append(detail::stabilizer_block(L, red));
    c.cancel_cz();
    return c;
}

/// Prepares a ground state of sum_{non-corner} K_i from |0...0>: X then H on
/// non-corner sites, then the CZ fans of the red non-corner stabilizers.
/// Corners stay in |0>.
inline Circuit compile_Ugs(const Lattice &L) {
    if (L.corners(Color::kBlue).size() > 1 || L.corners(Color::kRed).size() > 1) {
        throw UnsupportedGeometry("ground-state circuit needs at most one corner per sublattice");
    }
    auto nc = L.non_corner_sites();
    if (nc.empty()) throw UnsupportedGeometry("no non-corner sites");
    Circuit c(L);
    for (size_t i : nc) c.add(Gate::x(i));
    c.barrier();
    for (size_t i : nc) c.add(Gate::h(i));
    std::array<std::vector<Gate>, 4> by_dir;
    for (size_t i : nc) {
        if (L.color(i) != Color::kRed) continue;
        for (size_t j : L.neighbors(i)) by_dir[c.direction(i, j)].push_back(Gate::cz(j, i));
    }
    for (const auto &l : by_dir) {
        if (l.empty()) continue;
        c.barrier();
        for (const auto &g : l) c.add(g);
    }
    return c;
}

/// First-order product of the non-stabilizer terms of the second half period:
/// single-site fields, then CX-conjugated R_x for each V_xx bond, then
/// CX-conjugated R_z for each V_zz plaquette.
inline Circuit compile_perturbations(const Lattice &L, const FloquetProtocol &p, double dt) {
    p.validate();
    if (!(dt > 0)) throw Error("dt must be positive");
    Circuit c(L);
    const size_t n = L.num_sites();
    if (p.h_x != 0) {
        for (size_t i = 0; i < n; ++i) c.add(Gate::rx(i, 2 * p.h_x * dt));
    }
    for (size_t i : L.sites_of(Color::kRed)) {
        if (p.h_y != 0) c.add(Gate::ry(i, 2 * p.h_y * dt));
    }
    for (size_t i : L.sites_of(Color::kRed)) {
        if (p.h_z != 0) c.add(Gate::rz(i, 2 * p.h_z * dt));
    }
    if (p.V_xx != 0) {
        // CX(k -> j) X_k CX(k -> j) = X_k X_j.
        for (size_t k : L.sites_of(Color::kBlue)) {
            for (size_t j : L.neighbors(k)) {
                c.barrier();
                c.add(Gate::cx(k, j));
                c.add(Gate::rx(k, 2 * p.V_xx * dt));
                c.add(Gate::cx(k, j));
            }
        }
    }
    if (p.V_zz != 0) {
        // With A = (prod_j CX(j -> i)) CX(i -> j1), A^dag Z_i A = prod_j Z_j.
        for (size_t i : L.non_corner_sites()) {
            const auto &nb = L.neighbors(i);
            c.barrier();
            c.add(Gate::cx(i, nb.front()));
            for (size_t j : nb) c.add(Gate::cx(j, i));
            c.add(Gate::rz(i, 2 * p.V_zz * dt));
            for (auto it = nb.rbegin(); it != nb.rend(); ++it) c.add(Gate::cx(*it, i));
            c.add(Gate::cx(i, nb.front()));
        }
    }
    c.barrier();
    return c;
}

/// One drive period: U1, then `substeps` repetitions of U2 and the
/// perturbation product over T / (2 substeps) each.
inline Circuit compile_period(const Lattice &L, const FloquetProtocol &p, size_t substeps = 1,
                              PulseAngle mode = PulseAngle::kDriveConsistent) {
    if (substeps == 0) throw Error("substeps must be >= 1");
    const double dt = p.period() / 2 / static_cast<double>(substeps);
    Circuit c = compile_U1(L, p, mode);
    auto u2 = compile_U2(L, p, dt);
    auto pert = compile_perturbations(L, p, dt);
    for (size_t s = 0; s < substeps; ++s) {
        c.append(u2);
        c.append(pert);
    }
    return c;
}

/// U_gs^dag (U_F^dag)^n (U_F)^n U_gs.
inline Circuit echo_circuit(const Circuit &prep, const Circuit &period, size_t n) {
    Circuit c(prep.lattice());
    c.append(prep);
    for (size_t k = 0; k < n; ++k) c.append(period);
    auto back = period.inverse();
    for (size_t k = 0; k < n; ++k) c.append(back);
    c.append(prep.inverse());
    return c;
}

// ---------------------------------------------------------------------------
// Simulation

namespace detail {

inline void apply_1q(cd *a, size_t dim, size_t q, const std::array<cd, 4> &m) {
    const size_t bit = size_t{1} << q;
    for (size_t b = 0; b < dim; ++b) {
        if (b & bit) continue;
        cd x0 = a[b], x1 = a[b | bit];
        a[b] = m[0] * x0 + m[1] * x1;
        a[b | bit] = m[2] * x0 + m[3] * x1;
    }
}

}  // namespace detail

inline void apply_gate(const Gate &g, StateVector &v) {
    auto amp = v.amplitudes();
    cd *a = amp.data();
    const size_t dim = amp.size();
    if (g.q0 >= v.num_qubits() || g.q1 >= v.num_qubits()) throw DimensionMismatch("gate qubit out of range");
    const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
    switch (g.kind) {
        case GateKind::kH: {
            const double r = std::numbers::sqrt2 / 2;
            detail::apply_1q(a, dim, g.q0, {r, r, r, -r});
            break;
        }
        case GateKind::kX:
            detail::apply_1q(a, dim, g.q0, {0, 1, 1, 0});
            break;
        case GateKind::kRX:
            detail::apply_1q(a, dim, g.q0, {c, cd(0, -s), cd(0, -s), c});
            break;
        case GateKind::kRY:
            detail::apply_1q(a, dim, g.q0, {c, -s, s, c});
            break;
        case GateKind::kRZ:
            detail::apply_1q(a, dim, g.q0, {cd(c, -s), 0, 0, cd(c, s)});
            break;
        case GateKind::kCZ: {
            const size_t m = (size_t{1} << g.q0) | (size_t{1} << g.q1);
            for (size_t b = 0; b < dim; ++b) {
                if ((b & m) == m) a[b] = -a[b];
            }
            break;
        }
        case GateKind::kCX: {
            const size_t cb = size_t{1} << g.q0, tb = size_t{1} << g.q1;
            for (size_t b = 0; b < dim; ++b) {
                if ((b & cb) && !(b & tb)) std::swap(a[b], a[b | tb]);
            }
            break;
        }
    }
}

inline void simulate_inplace(const Circuit &c, StateVector &v) {
    if (c.num_qubits() != v.num_qubits()) throw DimensionMismatch("circuit and state sizes differ");
    for (const auto &l : c.layers()) {
        for (const auto &g : l) apply_gate(g, v);
    }
}

/// Ideal output state.
inline StateVector simulate(const Circuit &c, const StateVector &initial) {
    StateVector v = initial;
    simulate_inplace(c, v);
    return v;
}

/// Uniform depolarizing errors: after each one-qubit (two-qubit) gate, a
/// uniformly random non-identity Pauli on its support with probability p1 (p2).
struct NoiseModel {
    double p1 = 0;
    double p2 = 0;
    size_t trajectories = 1;
    std::optional<uint64_t> seed;

    bool noisy() const {
        return p1 > 0 || p2 > 0;
    }
    void validate() const {
        if (!(p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1)) throw Error("error probabilities must lie in [0, 1]");
        if (trajectories == 0) throw Error("trajectories must be >= 1");
        if (noisy() && !seed) throw SeedRequired("noisy simulation needs a seed");
    }
};

struct Estimate {
    double mean = 0;
    double standard_error = 0;
};

namespace detail {

/// One trajectory's error stream. Every gate draws the same number of variates
/// whatever the outcome, so runs at different p share their randomness.
class ErrorSampler {
   public:
    ErrorSampler(const NoiseModel &m, uint64_t seed, uint64_t trajectory) : m_(m) {
        std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                          static_cast<uint32_t>(trajectory), static_cast<uint32_t>(trajectory >> 32)};
        rng_.seed(seq);
    }

    void after(const Gate &g, StateVector &v) {
        double u = uni_(rng_);
        if (!g.two_qubit()) {
            int k = static_cast<int>(pick3_(rng_));
            if (u < m_.p1) apply_pauli_inplace(single(v.num_qubits(), g.q0, k + 1), v);
            return;
        }
        int k = static_cast<int>(pick15_(rng_)) + 1;
        if (u < m_.p2) {
            auto p = single(v.num_qubits(), g.q0, k & 3) * single(v.num_qubits(), g.q1, k >> 2);
            apply_pauli_inplace(p, v);
        }
    }

   private:
    static PauliString single(size_t n, size_t q, int k) {
        static constexpr char names[4] = {'I', 'X', 'Y', 'Z'};
        if (k == 0) return PauliString(n);
        return PauliString::single(n, q, names[k]);
    }
    static void apply_pauli_inplace(const PauliString &p, StateVector &v) {
        detail::apply_pauli_inplace(p, v.amplitudes().data(), v.dimension());
    }

    NoiseModel m_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
    std::uniform_int_distribution<unsigned> pick3_{0, 2};
    std::uniform_int_distribution<unsigned> pick15_{0, 14};
};

inline void run_noisy(const Circuit &c, StateVector &v, ErrorSampler &errors) {
    for (const auto &l : c.layers()) {
        for (const auto &g : l) {
            apply_gate(g, v);
            errors.after(g, v);
        }
    }
}

inline std::vector<Estimate> reduce(const std::vector<std::vector<double>> &samples, size_t count) {
    std::vector<Estimate> out(count);
    const double n = static_cast<double>(samples.size());
    for (size_t k = 0; k < count; ++k) {
        double s = 0, s2 = 0;
        for (const auto &row : samples) {
            s += row[k];
            s2 += row[k] * row[k];
        }
        double mean = s / n;
        double var = samples.size() > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
        out[k] = {mean, std::sqrt(var / n)};
    }
    return out;
}

}  // namespace detail

/// Expectations of `observables` after `c`. Without noise this is the exact
/// value with zero error; with noise, sample means over trajectories seeded
/// from (seed, trajectory index).
inline std::vector<Estimate> sample_expectations(const Circuit &c, const StateVector &initial, const NoiseModel &noise,
                                                 const std::vector<PauliString> &observables, size_t workers = 1) {
    noise.validate();
    if (c.num_qubits() != initial.num_qubits()) throw DimensionMismatch("circuit and state sizes differ");
    if (!noise.noisy()) {
        auto v = simulate(c, initial);
        std::vector<Estimate> out;
        for (const auto &o : observables) out.push_back({expectation(o, v), 0.0});
        return out;
    }
    auto samples = parallel_map(noise.trajectories, workers, [&](size_t t) {
        detail::ErrorSampler errors(noise, *noise.seed, t);
        StateVector v = initial;
        detail::run_noisy(c, v, errors);
        std::vector<double> row;
        for (const auto &o : observables) row.push_back(expectation(o, v));
        return row;
    });
    return detail::reduce(samples, observables.size());
}

/// Per-period expectations for prep followed by n_max periods. Row n holds
/// the estimates after n periods.
inline std::vector<std::vector<Estimate>> sample_dynamics(const Circuit &prep, const Circuit &period,
                                                          const StateVector &initial, size_t n_max,
                                                          const NoiseModel &noise,
                                                          const std::vector<PauliString> &observables,
                                                          size_t workers = 1) {
    noise.validate();
    if (prep.num_qubits() != initial.num_qubits() || period.num_qubits() != initial.num_qubits()) {
        throw DimensionMismatch("circuit and state sizes differ");
    }
    const size_t trajectories = noise.noisy() ? noise.trajectories : 1;
    const size_t m = observables.size();
    // samples[t][n * m + k]
    auto samples = parallel_map(trajectories, workers, [&](size_t t) {
        std::optional<detail::ErrorSampler> errors;
        if (noise.noisy()) errors.emplace(noise, *noise.seed, t);
        StateVector v = initial;
        auto run = [&](const Circuit &c) {
            if (errors) {
                detail::run_noisy(c, v, *errors);
            } else {
                simulate_inplace(c, v);
            }
        };
        std::vector<double> row;
        row.reserve((n_max + 1) * m);
        run(prep);
        for (size_t n = 0; n <= n_max; ++n) {
            if (n > 0) run(period);
            for (const auto &o : observables) row.push_back(expectation(o, v));
        }
        return row;
    });
    auto flat = detail::reduce(samples, (n_max + 1) * m);
    std::vector<std::vector<Estimate>> out(n_max + 1);
    for (size_t n = 0; n <= n_max; ++n) out[n].assign(flat.begin() + n * m, flat.begin() + (n + 1) * m);
    return out;
}

/// sqrt(<Z_site>) after the echo circuit of each depth 0..n_max, from |0...0>.
/// Negative means clamp to zero before the root.
inline std::vector<Estimate> echo_series(const Circuit &prep, const Circuit &period, size_t n_max, size_t site,
                                         const NoiseModel &noise, size_t workers = 1) {
    const size_t nq = prep.num_qubits();
    auto z = PauliString::single(nq, site, 'Z');
    std::vector<Estimate> out;
    for (size_t n = 0; n <= n_max; ++n) {
        auto e = sample_expectations(echo_circuit(prep, period, n), StateVector::basis_state(nq, 0), noise, {z}, workers);
        double m = std::max(0.0, e[0].mean);
        double r = std::sqrt(m);
        out.push_back({r, r > 0 ? e[0].standard_error / (2 * r) : e[0].standard_error});
    }
    return out;
}

}  // namespace cornerdtc
