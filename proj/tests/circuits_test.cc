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

#include "cornerdtc/circuits.hpp"

#include <gtest/gtest.h>

#include "dense_oracle.hpp"

using namespace cornerdtc;

namespace {

Lattice twelve() {
    return build_lattice({2, 3}, {2, 3}, {0.5, 0.5});
}
Lattice eight() {
    return build_lattice({2, 2}, {2, 2}, {0.5, 0.5});
}

oracle::Mat circuit_unitary(const Circuit &c) {
    const size_t dim = size_t{1} << c.num_qubits();
    oracle::Mat U(dim, dim);
    for (size_t b = 0; b < dim; ++b) U.col(b) = oracle::to_eigen(simulate(c, StateVector::basis_state(c.num_qubits(), b)));
    return U;
}

// max |A - e^{i phi} B| with phi fixed by the largest entry of B.
double phase_distance(const oracle::Mat &A, const oracle::Mat &B) {
    Eigen::Index r, c;
    B.cwiseAbs().maxCoeff(&r, &c);
    cd ph = A(r, c) / B(r, c);
    ph /= std::abs(ph);
    return (A - ph * B).cwiseAbs().maxCoeff();
}

// Same for a batch of states evolved by two maps; one phase for the batch.
double phase_distance(const std::vector<StateVector> &a, const std::vector<StateVector> &b) {
    cd ph = b[0].inner(a[0]);
    ph /= std::abs(ph);
    double worst = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        for (size_t i = 0; i < a[k].dimension(); ++i) worst = std::max(worst, std::abs(a[k][i] - ph * b[k][i]));
    }
    return worst;
}

// exp(-i dt sum c K) for commuting K, one factor at a time.
StateVector commuting_evolution(const std::vector<std::pair<double, PauliString>> &terms, StateVector v, double dt) {
    for (const auto &[c, K] : terms) {
        auto Kv = apply(K, v);
        for (size_t b = 0; b < v.dimension(); ++b) v[b] = std::cos(c * dt) * v[b] - cd(0, std::sin(c * dt)) * Kv[b];
    }
    return v;
}

std::vector<std::pair<double, PauliString>> stabilizer_terms(const Lattice &L, const FloquetProtocol &p) {
    std::vector<std::pair<double, PauliString>> t;
    for (size_t i : L.non_corner_sites()) t.emplace_back(p.J(L.color(i)), stabilizer_support(L, i));
    if (p.include_corner_K1) t.emplace_back(p.J_b, stabilizer_support(L, blue_corner(L)));
    return t;
}

}  // namespace

TEST(compile_U1, angles) {
    auto L = eight();
    FloquetProtocol p;
    auto c = compile_U1(L, p);
    ASSERT_EQ(c.gate_count(), 8u);
    ASSERT_EQ(c.depth(), 1u);
    ASSERT_NEAR(c.layers()[0][3].angle, std::numbers::pi, 1e-15);
    ASSERT_LT(phase_distance(circuit_unitary(c), oracle::dense(symmetry_generators(L).global)), 1e-12);

    auto q = FloquetProtocol::figure1(4.0);
    ASSERT_NEAR(compile_U1(L, q).layers()[0][0].angle, std::numbers::pi + 0.05 * std::numbers::pi / 2, 1e-15);
    ASSERT_NEAR(compile_U1(L, q, PulseAngle::kReversed).layers()[0][0].angle,
                std::numbers::pi - 0.05 * std::numbers::pi / 2, 1e-15);
}

TEST(compile_U1, matches_pulse) {
    auto L = eight();
    auto p = FloquetProtocol::figure1(3.0);
    auto ref = oracle::expm_hermitian(oracle::dense(build_drive(L, p).H1), p.period() / 2);
    ASSERT_LT(phase_distance(circuit_unitary(compile_U1(L, p)), ref), 1e-10);
}

TEST(compile_U2, dense_oracle_eight_sites) {
    auto L = eight();
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.05, 1.5);
    for (bool k1 : {true, false}) {
        FloquetProtocol p;
        p.J_r = u(rng) * 3;
        p.J_b = u(rng);
        p.include_corner_K1 = k1;
        double dt = u(rng);
        OperatorSum H(L.num_sites());
        for (const auto &[c, K] : stabilizer_terms(L, p)) H.add(c, K);
        auto ref = oracle::expm_hermitian(oracle::dense(H), dt);
        ASSERT_LT(phase_distance(circuit_unitary(compile_U2(L, p, dt)), ref), 1e-10);
    }
}

TEST(compile_U2, exact_on_twelve_sites) {
    auto L = twelve();
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int trial = 0; trial < 3; ++trial) {
        FloquetProtocol p;
        p.J_r = trial == 0 ? 1.0 : u(rng);
        p.include_corner_K1 = trial != 1;
        double dt = trial == 0 ? p.period() / 2 : u(rng);
        auto c = compile_U2(L, p, dt);
        std::vector<StateVector> a, b;
        for (int k = 0; k < 3; ++k) {
            auto v = StateVector::random(12, rng);
            a.push_back(simulate(c, v));
            b.push_back(commuting_evolution(stabilizer_terms(L, p), v, dt));
        }
        ASSERT_LT(phase_distance(a, b), 1e-10) << "trial " << trial;
    }
}

TEST(compile_U2, structure) {
    auto L = twelve();
    FloquetProtocol p;
    auto tiny = compile_U2(L, p, 1e-14);
    std::mt19937_64 rng(63);
    auto v = StateVector::random(12, rng);
    auto w = simulate(tiny, v);
    for (size_t b = 0; b < v.dimension(); ++b) ASSERT_NEAR(std::abs(w[b] - v[b]), 0.0, 1e-12);

    // Dimerization only changes the central R_x angles.
    FloquetProtocol d = p;
    d.J_r = 2.5;
    auto a = compile_U2(L, p, 0.3), b = compile_U2(L, d, 0.3);
    ASSERT_EQ(a.depth(), b.depth());
    for (size_t k = 0; k < a.depth(); ++k) {
        ASSERT_EQ(a.layers()[k].size(), b.layers()[k].size());
        for (size_t g = 0; g < a.layers()[k].size(); ++g) {
            const auto &ga = a.layers()[k][g], &gb = b.layers()[k][g];
            ASSERT_EQ(ga.kind, gb.kind);
            ASSERT_EQ(ga.q0, gb.q0);
            if (ga.kind == GateKind::kRX && L.color(ga.q0) == Color::kRed) {
                ASSERT_DOUBLE_EQ(gb.angle, 2.5 * ga.angle);
            } else {
                ASSERT_EQ(ga, gb);
            }
        }
    }

    // Cancellation leaves fewer CZs than two fans per stabilizer.
    size_t naive = 0;
    for (const auto &[c, K] : stabilizer_terms(L, p)) naive += 2 * (K.weight() - 1);
    ASSERT_LT(a.count(GateKind::kCZ), naive);
    ASSERT_EQ(a.count(GateKind::kRX), 11u);
}

TEST(compile_U2, depth_independent_of_size) {
    FloquetProtocol p;
    auto small = compile_U2(twelve(), p, 0.4);
    auto large = compile_U2(build_lattice({3, 3}, {3, 3}, {0.5, 0.5}), p, 0.4);
    ASSERT_EQ(small.depth(), large.depth());
    ASSERT_GT(large.gate_count(), small.gate_count());
}

TEST(circuit, rejects_non_adjacent_gates) {
    auto L = twelve();
    Circuit c(L);
    c.add(Gate::cz(0, 6));
    ASSERT_THROW(c.add(Gate::cz(0, 1)), NonAdjacentGate);
    ASSERT_THROW(c.add(Gate::cx(3, 3)), NonAdjacentGate);
    ASSERT_THROW(c.add(Gate::h(12)), DimensionMismatch);
    ASSERT_THROW(Circuit::from_text(L, "CX 0 11\n"), NonAdjacentGate);
}

TEST(circuit, inverse_undoes) {
    auto L = eight();
    auto c = compile_period(L, FloquetProtocol::figure1(2.0), 2);
    std::mt19937_64 rng(64);
    auto v = StateVector::random(8, rng);
    auto w = simulate(c.inverse(), simulate(c, v));
    for (size_t b = 0; b < v.dimension(); ++b) ASSERT_NEAR(std::abs(w[b] - v[b]), 0.0, 1e-12);
}

TEST(circuit, text_round_trip) {
    auto L = twelve();
    auto c = compile_period(L, FloquetProtocol::figure1(4.0), 1);
    c.append(compile_Ugs(L));
    auto text = c.to_text();
    ASSERT_NE(text.find("CZ 0 6\n"), std::string::npos);
    auto back = Circuit::from_text(L, text);
    ASSERT_TRUE(back == c);
    ASSERT_EQ(back.to_text(), text);
    ASSERT_THROW(Circuit::from_text(L, "RX 1\n"), ParseError);
    ASSERT_THROW(Circuit::from_text(L, "SWAP 1 2\n"), ParseError);
    ASSERT_THROW(Circuit::from_text(L, "RX 1 0.5x\n"), ParseError);
    ASSERT_THROW(Circuit::from_text(L, "H 1 2\n"), ParseError);
    auto packed = Circuit::from_text(L, "H 0\nH 1\nCZ 0 6\n");
    ASSERT_EQ(packed.depth(), 2u);
}

TEST(compile_Ugs, prepares_ground_manifold) {
    auto L = twelve();
    auto c = compile_Ugs(L);
    auto psi = simulate(c, StateVector::basis_state(12, 0));
    for (size_t i : L.non_corner_sites()) ASSERT_NEAR(expectation(stabilizer_support(L, i), psi), -1.0, 1e-10);
    FloquetProtocol p;
    auto H = build_heff(L, p);
    ASSERT_NEAR(expectation(H, psi) / 2, -5.0, 1e-10);

    auto e = ground_state(H, 4);
    double w = 0;
    for (const auto &v : e.vectors) w += std::norm(v.inner(psi));
    ASSERT_NEAR(w, 1.0, 1e-9);
    ASSERT_NEAR(expectation(corner_operators(L).z_tilde, psi), 1.0, 1e-12);
    ASSERT_THROW(compile_Ugs(build_lattice({4, 4}, {3, 3}, {0.5, 0.5})), UnsupportedGeometry);
}

TEST(compile_perturbations, exact_commuting_pieces) {
    auto L = eight();
    const size_t n = L.num_sites();
    FloquetProtocol zero;
    ASSERT_TRUE(compile_perturbations(L, zero, 0.3).empty());

    const double dt = 0.37;
    struct Case {
        const char *name;
        void (*set)(FloquetProtocol &);
    };
    for (auto c : {Case{"h_x", [](FloquetProtocol &p) { p.h_x = 0.7; }},
                   Case{"h_y", [](FloquetProtocol &p) { p.h_y = 0.6; }},
                   Case{"h_z", [](FloquetProtocol &p) { p.h_z = -0.5; }},
                   Case{"V_xx", [](FloquetProtocol &p) { p.V_xx = 0.45; }},
                   Case{"V_zz", [](FloquetProtocol &p) { p.V_zz = -0.8; }}}) {
        FloquetProtocol p;
        c.set(p);
        OperatorSum H(n);
        for (size_t i = 0; i < n; ++i) H.add(p.h_x, PauliString::single(n, i, 'X'));
        for (size_t i : L.sites_of(Color::kRed)) {
            H.add(p.h_y, PauliString::single(n, i, 'Y'));
            H.add(p.h_z, PauliString::single(n, i, 'Z'));
        }
        for (auto [i, j] : L.edges()) H.add(p.V_xx, PauliString::from_sparse(n, {{i, 'X'}, {j, 'X'}}));
        for (size_t i : L.non_corner_sites()) H.add(p.V_zz, plaquette_support(L, i));
        auto ref = oracle::expm_hermitian(oracle::dense(H.canonicalized()), dt);
        ASSERT_LT(phase_distance(circuit_unitary(compile_perturbations(L, p, dt)), ref), 1e-10) << c.name;
    }
}

TEST(compile_period, converges_to_floquet_step) {
    auto L = eight();
    auto p = FloquetProtocol::figure1(8.0);
    std::mt19937_64 rng(65);
    auto v = StateVector::random(8, rng);
    auto exact = floquet_step(L, p, v);
    std::vector<double> infidelity;
    for (size_t s : {2u, 4u, 8u}) {
        auto w = simulate(compile_period(L, p, s), v);
        infidelity.push_back(1 - std::norm(exact.inner(w)));
    }
    ASSERT_LT(infidelity[0], 0.05);
    for (size_t k = 0; k + 1 < infidelity.size(); ++k) {
        double r = infidelity[k] / infidelity[k + 1];
        ASSERT_GT(r, 3.0);
        ASSERT_LT(r, 5.0);
    }
}

TEST(simulate, zero_noise_is_ideal) {
    auto L = eight();
    auto c = compile_period(L, FloquetProtocol::figure1(2.0));
    std::vector<PauliString> obs = {PauliString::single(8, 0, 'Z'), stabilizer_support(L, 3)};
    std::mt19937_64 rng(66);
    auto v = StateVector::random(8, rng);
    NoiseModel none;
    none.trajectories = 5;
    auto est = sample_expectations(c, v, none, obs);
    auto ideal = simulate(c, v);
    for (size_t k = 0; k < obs.size(); ++k) {
        ASSERT_EQ(est[k].mean, expectation(obs[k], ideal));
        ASSERT_EQ(est[k].standard_error, 0.0);
    }
    NoiseModel unseeded;
    unseeded.p2 = 0.01;
    ASSERT_THROW(sample_expectations(c, v, unseeded, obs), SeedRequired);
    NoiseModel bad;
    bad.p1 = 1.5;
    ASSERT_THROW(sample_expectations(c, v, bad, obs), Error);
}

TEST(simulate, zero_noise_echo_is_one) {
    auto L = twelve();
    auto prep = compile_Ugs(L);
    auto period = compile_period(L, FloquetProtocol::figure1(4.0));
    auto echo = echo_series(prep, period, 3, 0, NoiseModel{});
    for (const auto &e : echo) ASSERT_NEAR(e.mean, 1.0, 1e-12);
}

TEST(simulate, noisy_runs_are_reproducible) {
    auto L = eight();
    auto c = compile_period(L, FloquetProtocol::figure1(4.0));
    NoiseModel m;
    m.p1 = 0.01;
    m.p2 = 0.02;
    m.trajectories = 40;
    m.seed = 7;
    std::vector<PauliString> obs = {PauliString::single(8, 0, 'Z')};
    auto v = StateVector::basis_state(8, 0);
    auto a = sample_expectations(c, v, m, obs, 1);
    auto b = sample_expectations(c, v, m, obs, 3);
    ASSERT_EQ(a[0].mean, b[0].mean);
    ASSERT_EQ(a[0].standard_error, b[0].standard_error);
    ASSERT_GT(a[0].standard_error, 0.0);
    m.seed = 8;
    ASSERT_NE(sample_expectations(c, v, m, obs)[0].mean, a[0].mean);
}

TEST(simulate, noise_bias_is_linear_at_small_p) {
    auto L = eight();
    auto prep = compile_Ugs(L);
    auto c = prep;
    auto period = compile_period(L, FloquetProtocol::figure1(4.0));
    for (int k = 0; k < 3; ++k) c.append(period);
    std::vector<PauliString> obs = {PauliString::single(8, 0, 'Z')};
    auto v = StateVector::basis_state(8, 0);
    double ideal = expectation(obs[0], simulate(c, v));
    std::vector<double> bias;
    for (double p : {0.0, 0.002, 0.004}) {
        NoiseModel m;
        m.p1 = p / 10;
        m.p2 = p;
        m.trajectories = 2000;
        m.seed = 11;
        bias.push_back(sample_expectations(c, v, m, obs)[0].mean - ideal);
    }
    ASSERT_EQ(bias[0], 0.0);
    ASSERT_GT(std::abs(bias[1]), 0.0);
    // Shared random streams make the two estimates nested, so the slope
    // ratio is close to 2 even with modest sampling.
    ASSERT_NEAR(bias[2] / bias[1], 2.0, 0.5);
}

TEST(simulate, noisy_signal_stays_under_echo) {
    auto L = eight();
    auto prep = compile_Ugs(L);
    auto period = compile_period(L, FloquetProtocol::figure1(16.0));
    NoiseModel m;
    m.p1 = 0.0005;
    m.p2 = 0.005;
    m.trajectories = 200;
    m.seed = 12;
    auto z = PauliString::single(8, 0, 'Z');
    auto dyn = sample_dynamics(prep, period, StateVector::basis_state(8, 0), 6, m, {z});
    auto echo = echo_series(prep, period, 6, 0, m);
    for (size_t n = 1; n <= 6; ++n) {
        ASSERT_LE(std::abs(dyn[n][0].mean), echo[n].mean + 3 * (dyn[n][0].standard_error + echo[n].standard_error) + 0.02)
            << "n=" << n;
        ASSERT_LT(echo[n].mean, 1.0);
    }
}
