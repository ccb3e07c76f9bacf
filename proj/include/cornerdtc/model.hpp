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
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cornerdtc/errors.hpp"
#include "cornerdtc/lattice.hpp"
#include "cornerdtc/pauli.hpp"

namespace cornerdtc {

/// Couplings and drive parameters of the two-step Floquet protocol.
struct FloquetProtocol {
    double J_r = 1.0;
    double J_b = 1.0;
    double epsilon = 0.0;
    double h_x = 0.0;
    double h_y = 0.0;
    double h_z = 0.0;
    double V_xx = 0.0;
    double V_zz = 0.0;
    double Omega = 4.0;
    bool include_corner_K1 = true;

    double period() const {
        return 2 * std::numbers::pi / Omega;
    }
    double eta() const {
        if (J_b == 0) throw Error("eta is undefined when J_b == 0");
        return J_r / J_b;
    }
    double J(Color c) const {
        return c == Color::kRed ? J_r : J_b;
    }

    void validate() const {
        for (double v : {J_r, J_b, epsilon, h_x, h_y, h_z, V_xx, V_zz, Omega}) {
            if (!std::isfinite(v)) throw Error("protocol parameters must be finite");
        }
        if (!(Omega > 0)) throw Error("Omega must be positive");
    }

    bool operator==(const FloquetProtocol &) const = default;

    /// J = 1, V_xx = 0.31, V_zz = 0.15, eps = 0.05, h = (0.21, 0.17, 0.19).
    static FloquetProtocol figure1(double omega = 4.0) {
        FloquetProtocol p;
        p.V_xx = 0.31;
        p.V_zz = 0.15;
        p.epsilon = 0.05;
        p.h_x = 0.21;
        p.h_y = 0.17;
        p.h_z = 0.19;
        p.Omega = omega;
        return p;
    }

    /// J_b = 1, J_r = eta, V_xx = 0.11, V_zz = 0.05, h_x = 0.11, Omega = 20.
    static FloquetProtocol figure3(double eta = 5.11) {
        FloquetProtocol p;
        p.J_b = 1.0;
        p.J_r = eta;
        p.V_xx = 0.11;
        p.V_zz = 0.05;
        p.h_x = 0.11;
        p.Omega = 20.0;
        return p;
    }
};

struct Drive {
    OperatorSum H1;  // first half period
    OperatorSum H2;  // second half period
};

inline void check_protocol(const FloquetProtocol &p) {
    p.validate();
}

inline Drive build_drive(const Lattice &L, const FloquetProtocol &p) {
    check_protocol(p);
    const size_t n = L.num_sites();
    Drive d{OperatorSum(n), OperatorSum(n)};
    const double pulse = std::numbers::pi / p.period() + p.epsilon;
    for (size_t i = 0; i < n; ++i) d.H1.add(pulse, PauliString::single(n, i, 'X'));

    for (size_t i : L.non_corner_sites()) d.H2.add(p.J(L.color(i)), stabilizer_support(L, i));
    if (p.include_corner_K1) {
        auto bc = L.corners(Color::kBlue);
        if (!bc.empty()) d.H2.add(p.J_b, stabilizer_support(L, bc.front()));
    }
    for (size_t i = 0; i < n; ++i) d.H2.add(p.h_x, PauliString::single(n, i, 'X'));
    for (size_t i : L.sites_of(Color::kRed)) {
        d.H2.add(p.h_y, PauliString::single(n, i, 'Y'));
        d.H2.add(p.h_z, PauliString::single(n, i, 'Z'));
    }
    for (auto [i, j] : L.edges()) d.H2.add(p.V_xx, PauliString::from_sparse(n, {{i, 'X'}, {j, 'X'}}));
    for (size_t i : L.non_corner_sites()) d.H2.add(p.V_zz, plaquette_support(L, i));
    d.H1 = d.H1.canonicalized();
    d.H2 = d.H2.canonicalized();
    return d;
}

/// 2 H_eff at leading order. Evolution uses half of it.
inline OperatorSum build_heff(const Lattice &L, const FloquetProtocol &p) {
    check_protocol(p);
    const size_t n = L.num_sites();
    OperatorSum h(n);
    for (size_t i : L.non_corner_sites()) h.add(p.J(L.color(i)), stabilizer_support(L, i));
    for (size_t i : L.non_corner_sites()) h.add(p.V_zz, plaquette_support(L, i));
    for (auto [i, j] : L.edges()) h.add(p.V_xx, PauliString::from_sparse(n, {{i, 'X'}, {j, 'X'}}));
    for (size_t i = 0; i < n; ++i) h.add(p.h_x + p.epsilon, PauliString::single(n, i, 'X'));
    return h.canonicalized();
}

/// 2 H_dual: stabilizer and plaquette roles exchanged.
inline OperatorSum build_dual(const Lattice &L, const FloquetProtocol &p) {
    check_protocol(p);
    const size_t n = L.num_sites();
    OperatorSum h(n);
    for (size_t i : L.non_corner_sites()) h.add(p.J(L.color(i)), plaquette_support(L, i));
    for (size_t i : L.non_corner_sites()) h.add(p.V_zz, stabilizer_support(L, i));
    for (auto [i, j] : L.edges()) h.add(p.V_xx, PauliString::from_sparse(n, {{i, 'X'}, {j, 'X'}}));
    for (size_t i = 0; i < n; ++i) h.add(p.h_x + p.epsilon, PauliString::single(n, i, 'X'));
    return h.canonicalized();
}

/// The Kramers-Wannier-like map sending K_i to P_i.
///
/// X_i is fixed. Z_i of a blue site picks up X on every red site in one open
/// quadrant of i; Z_i of a red site picks up X on every blue site in the
/// opposite quadrant. The quadrant is the one for which every non-corner K_i
/// maps to P_i.
class Duality {
   public:
    explicit Duality(const Lattice &L) : n_(L.num_sites()) {
        for (int sx : {1, -1}) {
            for (int sy : {1, -1}) {
                build(L, sx, sy);
                bool ok = true;
                for (size_t i : L.non_corner_sites()) {
                    if (apply(stabilizer_support(L, i)) != plaquette_support(L, i)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    quadrant_ = {sx, sy};
                    return;
                }
            }
        }
        throw UnsupportedGeometry("no quadrant orientation maps every stabilizer onto its plaquette");
    }

    /// Direction (sign of dx, sign of dy) from a blue site to the red sites
    /// attached to its Z image.
    std::array<int, 2> quadrant() const {
        return quadrant_;
    }

    const PauliString &image_of_z(size_t site) const {
        return z_image_.at(site);
    }

    /// Maps s = c * prod_k Z_k^{z_k} * prod_k X_k^{x_k} generator by generator.
    PauliString apply(const PauliString &s) const {
        if (s.num_sites() != n_) throw DimensionMismatch("string and lattice sizes differ");
        PauliString ordered(n_);
        PauliString image(n_);
        for (size_t k = 0; k < n_; ++k) {
            if ((s.z_mask() >> k) & 1) {
                ordered = ordered * PauliString(n_, 0, uint64_t{1} << k);
                image = image * z_image_[k];
            }
        }
        PauliString xs(n_, s.x_mask(), 0);
        ordered = ordered * xs;
        image = image * xs;
        // s and `ordered` share masks; their phases differ by the constant c.
        Phase c = phase_from_quarter_turns(quarter_turns(s.phase()) - quarter_turns(ordered.phase()));
        return image.with_phase(image.phase() * c);
    }

   private:
    void build(const Lattice &L, int sx, int sy) {
        z_image_.assign(n_, PauliString(n_));
        for (const auto &si : L.sites()) {
            int s = si.color == Color::kBlue ? 1 : -1;
            uint64_t x = 0;
            for (const auto &sj : L.sites()) {
                if (sj.color == si.color) continue;
                if (s * sx * (sj.dx - si.dx) > 0 && s * sy * (sj.dy - si.dy) > 0) x |= uint64_t{1} << sj.index;
            }
            z_image_[si.index] = PauliString(n_, x, uint64_t{1} << si.index);
        }
    }

    size_t n_;
    std::array<int, 2> quadrant_{0, 0};
    std::vector<PauliString> z_image_;
};

inline PauliString dualize(const Lattice &L, const PauliString &s) {
    return Duality(L).apply(s);
}

struct CornerOperators {
    PauliString z_tilde;  // Z on the blue corner
    PauliString x_tilde;  // K at the blue corner
};

inline CornerOperators corner_operators(const Lattice &L) {
    size_t c = blue_corner(L);
    return {PauliString::single(L.num_sites(), c, 'Z'), stabilizer_support(L, c)};
}

/// eta^3 / ((eta^2 - 1)(eta^2 - 9)); poles at eta = 1 and 3.
inline double resonance_coefficient(double eta) {
    if (std::abs(eta - 1) < 1e-6 || std::abs(eta - 3) < 1e-6) {
        throw ResonantEta("eta = " + std::to_string(eta) + " is resonant");
    }
    double e2 = eta * eta;
    return eta * e2 / ((e2 - 1) * (e2 - 9));
}

/// Single-X correction around the corner: X1 Z2 Z3 Z4 X5 in corner labels.
inline PauliString lambda_x(const Lattice &L) {
    auto m = corner_label_map(L);
    return PauliString::from_sparse(L.num_sites(), {{m[0], 'X'}, {m[1], 'Z'}, {m[2], 'Z'}, {m[3], 'Z'}, {m[4], 'X'}});
}

/// Two-X correction around the corner, eight terms in corner labels.
inline OperatorSum lambda_xx(const Lattice &L, double eta) {
    auto m = corner_label_map(L);
    const size_t n = L.num_sites();
    auto P = [&](std::initializer_list<std::pair<int, char>> ops) {
        std::vector<std::pair<size_t, char>> v;
        for (auto [label, p] : ops) v.emplace_back(m[label - 1], p);
        return PauliString::from_sparse(n, v);
    };
    const double e1 = 1 / eta, e2 = e1 * e1, e3 = e2 * e1;
    const double a = 3 * e3 - e1;
    OperatorSum out(n);
    out.add(-6 * e3, P({{1, 'Y'}, {2, 'X'}, {3, 'X'}, {4, 'X'}, {5, 'Y'}, {8, 'Z'}}));
    out.add(7 * e2 - 1, P({{1, 'X'}, {2, 'Z'}, {3, 'Z'}, {4, 'Z'}}));
    out.add(a, P({{1, 'Y'}, {2, 'X'}, {5, 'Y'}, {6, 'Z'}}));
    out.add(a, P({{1, 'Y'}, {3, 'X'}, {5, 'Y'}, {7, 'Z'}}));
    out.add(2 * e2, P({{1, 'X'}, {2, 'Y'}, {3, 'Y'}, {4, 'Z'}, {6, 'Z'}, {7, 'Z'}}));
    out.add(2 * e2, P({{1, 'X'}, {2, 'Z'}, {3, 'Y'}, {4, 'Y'}, {6, 'Z'}, {8, 'Z'}}));
    out.add(2 * e2, P({{1, 'X'}, {2, 'Y'}, {3, 'Z'}, {4, 'Y'}, {7, 'Z'}, {8, 'Z'}}));
    out.add(a, P({{1, 'Y'}, {4, 'X'}, {5, 'Y'}, {6, 'Z'}, {7, 'Z'}, {8, 'Z'}}));
    return out;
}

/// Corner mode through first order in the perturbations. The two-X term
/// carries the sign under which [2 H_eff, Psi] loses its first-order part.
inline OperatorSum psi_first_order(const Lattice &L, const FloquetProtocol &p) {
    check_protocol(p);
    if (p.J_r == 0) throw Error("J_r must be nonzero");
    const double eta = p.eta();
    const double r = resonance_coefficient(eta);
    const size_t n = L.num_sites();
    OperatorSum out(n);
    out.add(1.0, corner_operators(L).z_tilde);
    out.add((p.h_x + p.epsilon) / p.J_r, lambda_x(L));
    out += (-r * p.V_xx / p.J_b) * lambda_xx(L, eta);
    return out.canonicalized();
}

}  // namespace cornerdtc
