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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "cornerdtc/errors.hpp"
#include "cornerdtc/lattice.hpp"
#include "cornerdtc/model.hpp"
#include "cornerdtc/pauli.hpp"

namespace cornerdtc {

namespace detail {

using VecMap = Eigen::Map<Eigen::VectorXcd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXcd>;

inline void apply_raw(const CompiledOperator &H, const cd *in, cd *out, size_t dim, size_t workers) {
    H.apply(std::span<const cd>(in, dim), std::span<cd>(out, dim), workers);
}

/// In-place v <- P v for a single Pauli string P.
inline void apply_pauli_inplace(const PauliString &p, cd *v, size_t dim) {
    const cd f = phase_value(p.phase() * phase_from_quarter_turns(static_cast<int>(p.num_y())));
    const uint64_t x = p.x_mask(), z = p.z_mask();
    auto coef = [&](uint64_t b) { return (std::popcount(b & z) & 1) ? -f : f; };
    if (x == 0) {
        for (size_t b = 0; b < dim; ++b) v[b] *= coef(b);
        return;
    }
    for (size_t b = 0; b < dim; ++b) {
        size_t c = b ^ x;
        if (c < b) continue;
        cd vb = v[b], vc = v[c];
        v[c] = coef(b) * vb;
        v[b] = coef(c) * vc;
    }
}

/// In-place v <- (v + sign P v) / 2.
inline void project_inplace(const PauliString &p, int sign, cd *v, size_t dim) {
    const cd f = static_cast<double>(sign) * phase_value(p.phase() * phase_from_quarter_turns(static_cast<int>(p.num_y())));
    const uint64_t x = p.x_mask(), z = p.z_mask();
    auto coef = [&](uint64_t b) { return (std::popcount(b & z) & 1) ? -f : f; };
    if (x == 0) {
        for (size_t b = 0; b < dim; ++b) v[b] *= 0.5 * (1.0 + coef(b));
        return;
    }
    // Pairs (b, b ^ x) with the highest set bit of x clear in b.
    const uint64_t hi = uint64_t{1} << (63 - std::countl_zero(x));
    for (size_t b = 0; b < dim; ++b) {
        if (b & hi) continue;
        size_t c = b ^ x;
        cd vb = v[b], vc = v[c];
        v[b] = 0.5 * (vb + coef(c) * vc);
        v[c] = 0.5 * (vc + coef(b) * vb);
    }
}

}  // namespace detail

/// A Pauli symmetry G with the sector eigenvalue sign (+1 or -1) to keep.
struct SectorConstraint {
    PauliString generator;
    int sign = 1;
};

struct EigenOptions {
    double tolerance = 1e-9;
    /// Subspace size before a thick restart; 0 picks a size from the dimension.
    size_t max_subspace = 0;
    size_t max_applications = 50000;
    uint64_t seed = 0x5eed5eedULL;
    std::vector<SectorConstraint> sector;
    size_t workers = 1;
};

struct Eigenpairs {
    std::vector<double> values;
    std::vector<StateVector> vectors;
    size_t applications = 0;
    double max_residual = 0;
};

/// k lowest eigenpairs of a Hermitian operator.
///
/// Block Krylov-Davidson iteration with full reorthogonalization, thick
/// restarts and in-order locking. The block starts from k random vectors, so
/// eigenspaces of multiplicity up to k are resolved; each step expands by the
/// residuals of the lowest unlocked Ritz pairs, which spans the block Lanczos
/// space. Optional Pauli symmetry sectors restrict the search space.
inline Eigenpairs lowest_eigenpairs(const CompiledOperator &H, size_t k, const EigenOptions &opt = {}) {
    const size_t n = H.num_sites();
    if (n > kMaxStateSites) throw DimensionMismatch("operator too large for state vectors");
    const size_t dim = size_t{1} << n;
    if (k == 0) return {};
    if (k > dim) throw DimensionMismatch("requested more eigenpairs than the Hilbert dimension");
    for (const auto &s : opt.sector) {
        if (s.generator.num_sites() != n) throw DimensionMismatch("sector generator size mismatch");
        if (!s.generator.is_hermitian() || (s.sign != 1 && s.sign != -1)) {
            throw Error("sector needs a Hermitian generator and sign +-1");
        }
    }

    size_t m = opt.max_subspace;
    if (m == 0) m = dim <= 4096 ? 100 : (dim <= (size_t{1} << 16) ? 80 : 40);
    m = std::min(dim, std::max(m, 4 * k + 4));

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;

    Eigen::MatrixXcd X(dim, k);  // locked
    std::vector<double> locked_vals;
    Eigen::MatrixXcd V(dim, m), W(dim, m);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, m);
    size_t nv = 0;
    size_t apps = 0;

    auto project = [&](Eigen::VectorXcd &v) {
        for (const auto &s : opt.sector) detail::project_inplace(s.generator, s.sign, v.data(), dim);
    };
    auto orthogonalize = [&](Eigen::VectorXcd &v) {
        for (int pass = 0; pass < 2; ++pass) {
            size_t nl = locked_vals.size();
            if (nl) v.noalias() -= X.leftCols(nl) * (X.leftCols(nl).adjoint() * v);
            if (nv) v.noalias() -= V.leftCols(nv) * (V.leftCols(nv).adjoint() * v);
        }
        return v.norm();
    };
    // Appends a normalized direction and its image under H.
    auto push = [&](const Eigen::VectorXcd &q) {
        V.col(nv) = q;
        detail::apply_raw(H, V.col(nv).data(), W.col(nv).data(), dim, opt.workers);
        ++apps;
        M.col(nv).head(nv + 1) = V.leftCols(nv + 1).adjoint() * W.col(nv);
        M.row(nv).head(nv + 1) = M.col(nv).head(nv + 1).adjoint();
        M(nv, nv) = M(nv, nv).real();
        ++nv;
    };
    Eigen::VectorXcd q(dim);
    auto push_random = [&]() {
        for (int attempt = 0; attempt < 8; ++attempt) {
            for (size_t i = 0; i < dim; ++i) q[i] = cd(gauss(rng), gauss(rng));
            project(q);
            double before = q.norm();
            if (before == 0) return false;
            double after = orthogonalize(q);
            if (after > 1e-8 * before) {
                push(q / after);
                return true;
            }
        }
        return false;
    };
    // Keep the Ritz vectors in columns [from, from + count).
    auto restart = [&](const Eigen::MatrixXcd &Y, const Eigen::VectorXd &theta, size_t from, size_t count) {
        Eigen::MatrixXcd Yk = Y.middleCols(from, count);
        Eigen::MatrixXcd Vn = V.leftCols(nv) * Yk;
        Eigen::MatrixXcd Wn = W.leftCols(nv) * Yk;
        V.leftCols(count) = Vn;
        W.leftCols(count) = Wn;
        M.setZero();
        for (size_t i = 0; i < count; ++i) M(i, i) = theta[from + i];
        nv = count;
    };

    for (size_t i = 0; i < k && nv < m; ++i) {
        if (!push_random()) break;
    }
    if (nv == 0) throw Error("symmetry sector is empty");

    // Locking well below the requested tolerance keeps the deflated problem
    // accurate for the next, possibly close, eigenvalue.
    const double lock_tol = 1e-2 * opt.tolerance;
    double last_residual = 0;
    Eigen::MatrixXcd R;

    while (true) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.topLeftCorner(nv, nv));
        const Eigen::MatrixXcd &Y = es.eigenvectors();
        const Eigen::VectorXd &theta = es.eigenvalues();
        const size_t want = k - locked_vals.size();
        const size_t nb = std::min(want, nv);
        const bool full = nv + locked_vals.size() >= dim;

        Eigen::MatrixXcd Ritz = V.leftCols(nv) * Y.leftCols(nb);
        R = W.leftCols(nv) * Y.leftCols(nb);
        R.noalias() -= Ritz * theta.head(nb).asDiagonal();
        size_t lock = 0;
        bool in_order = true;
        for (size_t i = 0; i < nb; ++i) {
            Eigen::VectorXcd r = R.col(i);
            project(r);
            R.col(i) = r;
            double res = r.norm();
            if (i == lock) last_residual = res;
            if (in_order && (res <= lock_tol || full)) {
                X.col(locked_vals.size() + lock) = Ritz.col(i) / Ritz.col(i).norm();
                ++lock;
            } else {
                in_order = false;
            }
        }
        for (size_t i = 0; i < lock; ++i) locked_vals.push_back(theta[i]);
        if (locked_vals.size() >= k) break;
        if (apps >= opt.max_applications) {
            throw NoConvergence("Lanczos eigensolver did not converge", apps, last_residual);
        }

        const size_t block = k - locked_vals.size();
        size_t keep = nv - lock;
        if (nv + block > m) keep = std::min(keep, std::max<size_t>(m / 2, 2 * block));
        if (lock > 0 || keep < nv - lock) restart(Y, theta, lock, keep);

        // Block Gram-Schmidt of the unconverged residuals against the locked
        // vectors and the current basis, then within the block.
        const size_t nr = std::min(nb - lock, m - nv);
        Eigen::MatrixXcd Q = R.middleCols(lock, nr);
        Eigen::VectorXd before = Q.colwise().norm().transpose();
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd norms = Q.colwise().norm().transpose();
            size_t nl = locked_vals.size();
            if (nl) Q.noalias() -= X.leftCols(nl) * (X.leftCols(nl).adjoint() * Q);
            if (nv) Q.noalias() -= V.leftCols(nv) * (V.leftCols(nv).adjoint() * Q);
            if ((Q.colwise().norm().transpose().array() >= 0.7 * norms.array()).all()) break;
        }
        size_t added = 0;
        for (size_t i = 0; i < nr && nv < m; ++i) {
            q = Q.col(i);
            const double mid = q.norm();
            for (size_t j = nv - added; j < nv; ++j) q -= V.col(j) * V.col(j).dot(q);
            // Heavy cancellation within the block: reorthogonalize in full.
            if (q.norm() < 0.7 * mid) {
                for (int pass = 0; pass < 2; ++pass) q -= V.leftCols(nv) * (V.leftCols(nv).adjoint() * q);
            }
            double after = q.norm();
            if (after > 1e-10 * std::max(before[i], 1e-300) && after > 1e-15) {
                push(q / after);
                ++added;
            }
        }
        if (added == 0 && !push_random()) {
            if (nv == 0) throw NoConvergence("symmetry sector smaller than the requested count", apps, 0);
            // Invariant subspace: what remains is exact.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rest(M.topLeftCorner(nv, nv));
            for (size_t i = 0; i < nv && locked_vals.size() < k; ++i) {
                X.col(locked_vals.size()) = V.leftCols(nv) * rest.eigenvectors().col(i);
                locked_vals.push_back(rest.eigenvalues()[i]);
            }
            if (locked_vals.size() < k) {
                throw NoConvergence("symmetry sector smaller than the requested count", apps, 0);
            }
            break;
        }
    }

    // Final Rayleigh-Ritz over the locked block, then explicit residuals.
    Eigen::MatrixXcd HX(dim, k);
    for (size_t i = 0; i < k; ++i) detail::apply_raw(H, X.col(i).data(), HX.col(i).data(), dim, opt.workers);
    Eigen::MatrixXcd B = X.adjoint() * HX;
    B = 0.5 * (B + B.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> fin(B);
    X = (X * fin.eigenvectors()).eval();
    HX = (HX * fin.eigenvectors()).eval();

    Eigenpairs out;
    out.applications = apps + k;
    for (size_t i = 0; i < k; ++i) {
        double e = fin.eigenvalues()[i];
        double res = (HX.col(i) - e * X.col(i)).norm();
        out.max_residual = std::max(out.max_residual, res);
        if (res > opt.tolerance) throw NoConvergence("eigenpair failed the residual check", apps, res);
        StateVector v = StateVector::zeros(n);
        detail::VecMap(v.amplitudes().data(), dim) = X.col(i) / X.col(i).norm();
        out.values.push_back(e);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

inline Eigenpairs ground_state(const OperatorSum &H, size_t k, const EigenOptions &opt = {}) {
    return lowest_eigenpairs(CompiledOperator(H), k, opt);
}

/// max - min of the four lowest levels.
inline double ground_manifold_width(const OperatorSum &H, const EigenOptions &opt = {}) {
    auto e = ground_state(H, 4, opt);
    return e.values.back() - e.values.front();
}

/// E_j - E_0 where level j is the one Z~ connects the ground state to
/// (the largest weight of Z~|psi_0> among the next levels of the low manifold).
/// Levels closer than `cluster` are treated as one.
inline double finite_size_gap(const OperatorSum &H, const PauliString &z_tilde, const EigenOptions &opt = {},
                              size_t manifold = 4, double cluster = 1e-8) {
    auto e = ground_state(H, manifold, opt);
    StateVector zpsi = apply(z_tilde, e.vectors[0]);
    double best_weight = -1, best_gap = 0;
    size_t j = 0;
    while (j < manifold) {
        double w = 0;
        size_t start = j;
        while (j < manifold && e.values[j] - e.values[start] < cluster) {
            w += std::norm(e.vectors[j].inner(zpsi));
            ++j;
        }
        if (w > best_weight + 1e-12) {
            best_weight = w;
            best_gap = e.values[start] - e.values[0];
        }
    }
    // Degenerate ground level: Z~ stays inside it.
    if (e.values[manifold - 1] - e.values[0] < cluster) return 0.0;
    return best_gap;
}

/// Per-site rotation exp(-i angle X) applied to every site.
struct PulseSchedule {
    size_t num_sites = 0;
    double angle = 0;
};

/// First half period: exp(-i (pi/2 + eps T / 2) sum_i X_i), exact as a product of
/// single-site rotations.
inline PulseSchedule half_period_pulse(const FloquetProtocol &p, size_t num_sites) {
    p.validate();
    return {num_sites, std::numbers::pi / 2 + p.epsilon * p.period() / 2};
}

inline void apply_pulse(const PulseSchedule &s, StateVector &v) {
    if (s.num_sites != v.num_qubits()) throw DimensionMismatch("pulse and state sizes differ");
    const double c = std::cos(s.angle), sn = std::sin(s.angle);
    const cd mis(0, -sn);
    auto a = v.amplitudes();
    for (size_t q = 0; q < s.num_sites; ++q) {
        const size_t bit = size_t{1} << q;
        for (size_t b = 0; b < a.size(); ++b) {
            if (b & bit) continue;
            cd x0 = a[b], x1 = a[b | bit];
            a[b] = c * x0 + mis * x1;
            a[b | bit] = mis * x0 + c * x1;
        }
    }
}

struct KrylovOptions {
    double tolerance = 1e-9;
    size_t max_dimension = 40;
    size_t workers = 1;
};

struct KrylovStats {
    size_t substeps = 0;
    size_t applications = 0;
    double error_estimate = 0;
    double norm_drift = 0;
};

/// v <- exp(-i H t) v by Lanczos projection. Sub-steps are halved until the
/// a-posteriori estimate beta_m |[exp(-i T tau) e1]_m| is below
/// tol * tau / t. The result is renormalized; the drift is reported.
inline KrylovStats krylov_evolve_inplace(const CompiledOperator &H, StateVector &v, double t,
                                         const KrylovOptions &opt = {}) {
    if (H.num_sites() != v.num_qubits()) throw DimensionMismatch("operator and state sizes differ");
    if (opt.tolerance < 1e-12) throw Error("Krylov tolerance must be >= 1e-12");
    KrylovStats stats;
    if (t == 0) return stats;
    const size_t dim = v.dimension();
    const size_t mmax = std::max<size_t>(2, std::min(opt.max_dimension, dim));
    Eigen::MatrixXcd V(dim, mmax + 1);
    Eigen::VectorXcd w(dim);
    detail::VecMap state(v.amplitudes().data(), dim);
    const double total = std::abs(t);
    const double sgn = t > 0 ? 1.0 : -1.0;
    double remaining = total;
    double tau = total;
    const double norm0 = state.norm();

    std::vector<double> alpha, beta;
    // exp(-i T tau) e1 on the leading m x m block and its error estimate.
    auto propagate = [&](size_t m, bool breakdown, double step, Eigen::VectorXcd &y) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (size_t j = 0; j < m; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::MatrixXd &S = es.eigenvectors();
        Eigen::VectorXcd ph(m);
        for (size_t i = 0; i < m; ++i) ph[i] = std::exp(cd(0, -sgn * es.eigenvalues()[i] * step)) * S(0, i);
        y = S.cast<cd>() * ph;
        return breakdown ? 0.0 : beta[m - 1] * std::abs(y[m - 1]);
    };

    while (remaining > 0) {
        double nrm = state.norm();
        V.col(0) = state / nrm;
        alpha.clear();
        beta.clear();
        size_t m = 0;
        bool breakdown = false;
        tau = std::min(remaining, tau);
        Eigen::VectorXcd y;
        for (size_t j = 0; j < mmax; ++j) {
            detail::apply_raw(H, V.col(j).data(), w.data(), dim, opt.workers);
            ++stats.applications;
            double a = V.col(j).dot(w).real();
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass) w.noalias() -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
            double b = w.norm();
            m = j + 1;
            if (b < 1e-13 * std::max(1.0, std::abs(a))) {
                breakdown = true;
                beta.push_back(0);
                break;
            }
            beta.push_back(b);
            V.col(j + 1) = w / b;
            if (m >= 4 && m % 2 == 0 && propagate(m, false, tau, y) <= opt.tolerance * tau / total) break;
        }

        double est = 0;
        for (int halvings = 0;; ++halvings) {
            est = propagate(m, breakdown, tau, y);
            if (est <= opt.tolerance * tau / total) break;
            if (halvings > 60) throw NoConvergence("Krylov step size underflow", stats.applications, est);
            tau /= 2;
        }
        state = nrm * (V.leftCols(m) * y);
        remaining -= tau;
        if (remaining < 1e-15 * total) remaining = 0;
        stats.substeps++;
        stats.error_estimate += est;
        if (m == mmax && est <= opt.tolerance * tau / total / 4) tau *= 2;
        if (m < mmax) tau = remaining;
    }
    double nfinal = state.norm();
    stats.norm_drift = std::abs(nfinal - norm0);
    state *= norm0 / nfinal;
    return stats;
}

inline StateVector krylov_evolve(const OperatorSum &H, const StateVector &v, double t, double tol = 1e-9) {
    StateVector out = v;
    KrylovOptions opt;
    opt.tolerance = tol;
    krylov_evolve_inplace(CompiledOperator(H), out, t, opt);
    return out;
}

/// One-period propagator U_F = exp(-i H2 T/2) * pulse, with H2 compiled once.
class FloquetEvolver {
   public:
    FloquetEvolver(const Lattice &L, const FloquetProtocol &p, KrylovOptions opt = {})
        : protocol_(p),
          pulse_(half_period_pulse(p, L.num_sites())),
          H2_(build_drive(L, p).H2),
          opt_(opt) {
    }

    const FloquetProtocol &protocol() const {
        return protocol_;
    }
    double period() const {
        return protocol_.period();
    }

    KrylovStats step(StateVector &v) const {
        apply_pulse(pulse_, v);
        return krylov_evolve_inplace(H2_, v, protocol_.period() / 2, opt_);
    }

   private:
    FloquetProtocol protocol_;
    PulseSchedule pulse_;
    CompiledOperator H2_;
    KrylovOptions opt_;
};

inline StateVector floquet_step(const Lattice &L, const FloquetProtocol &p, const StateVector &v) {
    StateVector out = v;
    FloquetEvolver(L, p).step(out);
    return out;
}

/// The state of the four-level low manifold of `H` with maximal <Z~>,
/// restricted to the G_r eigenspace that holds the lowest eigenstate.
inline StateVector corner_polarized_ground_state(const Lattice &L, const OperatorSum &H, const EigenOptions &opt = {}) {
    const size_t n = L.num_sites();
    const size_t dim = size_t{1} << n;
    auto e = ground_state(H, 4, opt);
    auto Gr = symmetry_generators(L).red;
    auto z = corner_operators(L).z_tilde;
    double gr0 = expectation(Gr, e.vectors[0]);
    int sr = gr0 >= 0 ? 1 : -1;

    std::vector<Eigen::VectorXcd> basis;
    for (const auto &v : e.vectors) {
        Eigen::VectorXcd u = detail::ConstVecMap(v.amplitudes().data(), dim);
        Eigen::VectorXcd g = u;
        detail::apply_pauli_inplace(Gr, g.data(), dim);
        u = 0.5 * (u + static_cast<double>(sr) * g);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : basis) u -= b * b.dot(u);
        }
        double nu = u.norm();
        if (nu > 1e-6) basis.push_back(u / nu);
    }
    const size_t d = basis.size();
    Eigen::MatrixXcd Zm(d, d);
    for (size_t j = 0; j < d; ++j) {
        Eigen::VectorXcd zb = basis[j];
        detail::apply_pauli_inplace(z, zb.data(), dim);
        for (size_t i = 0; i < d; ++i) Zm(i, j) = basis[i].dot(zb);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Zm);
    Eigen::VectorXcd c = es.eigenvectors().col(d - 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (size_t i = 0; i < d; ++i) psi += c[i] * basis[i];
    // Fix the global phase so the largest amplitude is real and positive.
    Eigen::Index imax;
    psi.cwiseAbs().maxCoeff(&imax);
    psi *= std::conj(psi[imax]) / std::abs(psi[imax]);
    psi /= psi.norm();
    StateVector out = StateVector::zeros(n);
    detail::VecMap(out.amplitudes().data(), dim) = psi;
    return out;
}

}  // namespace cornerdtc
