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

#include "cornerdtc/observables.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "dense_oracle.hpp"

using namespace cornerdtc;

namespace {

Lattice twelve() {
    return build_lattice({2, 3}, {2, 3}, {0.5, 0.5});
}

FloquetProtocol unperturbed(double omega = 4.0) {
    FloquetProtocol p;
    p.include_corner_K1 = false;
    p.Omega = omega;
    return p;
}

// Lowest state of H inside the (G_b = +1, G_r = +1) sector, by dense
// diagonalization with the other sectors pushed up.
oracle::Vec dense_sector_ground_state(const Lattice &L, const OperatorSum &H) {
    auto G = symmetry_generators(L);
    const auto dim = size_t{1} << L.num_sites();
    oracle::Mat I = oracle::Mat::Identity(dim, dim);
    oracle::Mat P = 0.25 * (I + oracle::dense(G.blue)) * (I + oracle::dense(G.red));
    oracle::Mat M = oracle::dense(H) + 1e3 * (I - P);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(M);
    return es.eigenvectors().col(0);
}

double dense_expectation(const PauliString &p, const oracle::Vec &v) {
    return v.dot(oracle::dense(p) * v).real();
}

}  // namespace

TEST(autocorrelation, exact_fixed_point) {
    auto L = twelve();
    auto p = unperturbed();
    auto psi = corner_polarized_ground_state(L, build_heff(L, p));
    auto c = corner_operators(L);
    size_t bulk = L.sites_of(SiteClass::kBulk).front();
    auto r = run_trajectory(L, p, psi,
                            {{"Z~", c.z_tilde}, {"X~", c.x_tilde}, {"K_bulk", stabilizer_support(L, bulk)}}, {}, 40);
    for (size_t n = 0; n <= 40; ++n) {
        double s = n % 2 ? -1.0 : 1.0;
        ASSERT_NEAR(r.autocorrelations[0].values[n], s, 1e-10);
        ASSERT_NEAR(r.autocorrelations[1].values[n], s, 1e-10);
        ASSERT_NEAR(r.autocorrelations[2].values[n], 1.0, 1e-10);
    }
}

TEST(autocorrelation, bulk_spin_beats_at_J) {
    auto L = twelve();
    auto p = unperturbed(3.0);
    auto psi = corner_polarized_ground_state(L, build_heff(L, p));
    for (size_t i : L.sites_of(SiteClass::kBulk)) {
        auto ts = autocorrelation(L, p, psi, PauliString::single(12, i, 'Z'), 30);
        for (size_t n = 0; n <= 30; ++n) {
            double expect = (n % 2 ? -1.0 : 1.0) * std::cos(p.J(L.color(i)) * ts.time(n));
            ASSERT_NEAR(ts.values[n], expect, 1e-8) << "site " << i << " n " << n;
        }
    }
}

TEST(autocorrelation, matches_dense_heisenberg_picture) {
    auto L = build_lattice({2, 2}, {2, 2}, {0.5, 0.5});
    auto p = FloquetProtocol::figure1(2.5);
    auto d = build_drive(L, p);
    oracle::Mat U = oracle::expm_hermitian(oracle::dense(d.H2), p.period() / 2) *
                    oracle::expm_hermitian(oracle::dense(d.H1), p.period() / 2);
    std::mt19937_64 rng(41);
    auto psi = StateVector::random(8, rng);
    auto O = PauliString::from_sparse(8, {{0, 'Z'}, {5, 'X'}});
    auto ts = autocorrelation(L, p, psi, O, 12);
    oracle::Mat Od = oracle::dense(O);
    oracle::Vec v = oracle::to_eigen(psi);
    oracle::Mat Un = oracle::Mat::Identity(256, 256);
    for (size_t n = 0; n <= 12; ++n) {
        oracle::Mat On = Un.adjoint() * Od * Un;
        cd c = v.dot(On * Od * v);
        ASSERT_NEAR(ts.values[n], c.real(), 1e-9);
        ASSERT_NEAR(ts.imag_residuals[n], c.imag(), 1e-9);
        ASSERT_LE(std::abs(ts.values[n]), 1 + 1e-9);
        Un = U * Un;
    }
    ASSERT_NEAR(ts.values[0], 1.0, 1e-12);
}

TEST(autocorrelation, eigenstate_shortcut_equals_expectation) {
    auto L = twelve();
    auto p = FloquetProtocol::figure3(2.0);
    StateVector up(12);
    auto z0 = PauliString::single(12, 0, 'Z');
    auto r = run_trajectory(L, p, up, {{"c", z0}}, {{"e", z0}}, 8);
    for (size_t n = 0; n <= 8; ++n) ASSERT_EQ(r.autocorrelations[0].values[n], r.expectations[0].values[n]);

    // The shortcut against the explicit two-state run on a sign-flipped copy.
    auto minus = PauliString::single(12, 3, 'Z');
    StateVector flipped = StateVector::basis_state(12, uint64_t{1} << 3);
    auto a = autocorrelation(L, p, flipped, minus, 6);
    auto b = expectation_series(L, p, flipped, {{"e", minus}}, 6).front();
    for (size_t n = 0; n <= 6; ++n) ASSERT_NEAR(a.values[n], -b.values[n], 1e-15);
}

TEST(autocorrelation, early_stop) {
    auto L = build_lattice({2, 2}, {2, 2}, {0.5, 0.5});
    TrajectoryOptions opt;
    opt.keep_going = [](size_t n, const TrajectoryResult &) { return n < 5; };
    auto ts = autocorrelation(L, FloquetProtocol::figure1(), StateVector(8), PauliString::single(8, 0, 'X'), 100, opt);
    ASSERT_EQ(ts.values.size(), 6u);
    ASSERT_THROW(autocorrelation(L, FloquetProtocol{}, StateVector(12), PauliString::single(8, 0, 'X'), 2),
                 DimensionMismatch);
}

TEST(energy_density, reference_points) {
    auto L = twelve();
    auto p = unperturbed();
    auto scale = energy_scale(L, p);
    ASSERT_NEAR(scale.ground_energy, -10.0, 1e-9);
    auto psi = ground_state(scale.heff, 1).vectors.front();
    ASSERT_NEAR(energy_density(scale, psi), 0.0, 1e-10);
    // No stabilizer has a nonzero mean on a Z-basis product state, so the
    // energy sits at the infinite-temperature value.
    ASSERT_NEAR(energy_density(scale, StateVector(12)), 1.0, 1e-12);

    auto fig = energy_scale(L, FloquetProtocol::figure1());
    std::mt19937_64 rng(42);
    double mean = 0;
    for (int k = 0; k < 20; ++k) mean += energy_density(fig, StateVector::random(12, rng)) / 20;
    ASSERT_NEAR(mean, 1.0, 0.05);
}

TEST(order_parameters, operators_on_twelve_sites) {
    auto ops = order_parameter_operators(twelve());
    ASSERT_EQ(ops.membrane.str(), "+Z0 Z5 X6 X7 X8 X9 X10");
    ASSERT_EQ(ops.zz.str(), "+Z0 Z5");
    ASSERT_EQ(ops.xx.str(), "+X0 X11");
    auto G = symmetry_generators(twelve());
    for (const auto &o : {ops.membrane, ops.zz, ops.xx}) {
        ASSERT_TRUE(commutes(o, G.blue));
        ASSERT_TRUE(commutes(o, G.red));
    }
    ASSERT_THROW(order_parameter_operators(build_lattice({4, 4}, {3, 3}, {0.5, 0.5})), NoCornerPresent);
}

TEST(order_parameters, match_dense_sector_oracle) {
    auto L = build_lattice({2, 2}, {2, 2}, {0.5, 0.5});
    auto ops = order_parameter_operators(L);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 4; ++trial) {
        FloquetProtocol p;
        p.V_zz = u(rng);
        p.V_xx = u(rng);
        p.h_x = 0.3 * u(rng);
        auto H = build_heff(L, p);
        auto o = order_parameters(L, H);
        auto v = dense_sector_ground_state(L, H);
        ASSERT_NEAR(o.membrane, dense_expectation(ops.membrane, v), 1e-8);
        ASSERT_NEAR(o.zz, dense_expectation(ops.zz, v), 1e-8);
        ASSERT_NEAR(o.xx, dense_expectation(ops.xx, v), 1e-8);
    }
}

TEST(order_parameters, phases_on_twelve_sites) {
    auto L = twelve();
    FloquetProtocol p;
    auto hospt = order_parameters(L, build_heff(L, p));
    ASSERT_NEAR(std::abs(hospt.membrane), 1.0, 1e-9);

    p.V_zz = 3;
    p.V_xx = 0.1;
    auto ssb = order_parameters(L, build_heff(L, p));
    ASSERT_GT(std::abs(ssb.zz), 0.95);
    ASSERT_LT(std::abs(ssb.membrane), 0.05);

    p.V_zz = 0.1;
    p.V_xx = 3;
    auto trivial = order_parameters(L, build_heff(L, p));
    ASSERT_GT(std::abs(trivial.xx), 0.95);
    ASSERT_LT(std::abs(trivial.membrane), 0.05);

    // Self-dual point: the duality exchanges the membrane and zz strings.
    p.V_zz = 1;
    p.V_xx = 0;
    auto dual = order_parameters(L, build_heff(L, p));
    ASSERT_NEAR(std::abs(dual.membrane), std::abs(dual.zz), 1e-8);
}

TEST(csv, round_trip_and_header) {
    TimeSeries ts;
    ts.label = "Z0";
    ts.period = 0.25;
    ts.protocol = FloquetProtocol::figure1();
    ts.values = {1.0, -0.5, 1.0 / 3};
    ts.imag_residuals = {0.0, 1e-17, -2e-16};
    auto text = to_csv(ts);
    ASSERT_NE(text.find("# fingerprint=" + protocol_fingerprint(ts.protocol)), std::string::npos);
    ASSERT_NE(text.find("n,t,value,imag_residual\n0,0,1,0\n1,0.25,-0.5,1e-17\n"), std::string::npos);
    auto dir = std::filesystem::temp_directory_path() / "cornerdtc_csv_test";
    std::filesystem::remove_all(dir);
    write_csv(ts, dir / "z.csv");
    auto back = parse_csv(read_file(dir / "z.csv"));
    ASSERT_EQ(back.label, "Z0");
    ASSERT_EQ(back.values, ts.values);
    ASSERT_EQ(back.imag_residuals, ts.imag_residuals);
    ASSERT_EQ(back.period, 0.25);
    ASSERT_FALSE(std::filesystem::exists(dir / "z.csv.tmp"));
    std::filesystem::remove_all(dir);
    ASSERT_THROW(parse_csv("n,t,value\n0,0,1\n"), ParseError);
}

TEST(csv, fingerprint_tracks_every_field) {
    auto base = FloquetProtocol::figure1();
    auto f = protocol_fingerprint(base);
    ASSERT_EQ(f.size(), 16u);
    auto q = base;
    q.h_z += 1e-12;
    ASSERT_NE(protocol_fingerprint(q), f);
    q = base;
    q.include_corner_K1 = false;
    ASSERT_NE(protocol_fingerprint(q), f);
    ASSERT_EQ(protocol_fingerprint(FloquetProtocol::figure1()), f);
}
