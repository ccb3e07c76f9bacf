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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cornerdtc/observables.hpp"
#include "cornerdtc/parallel.hpp"

namespace cornerdtc {

struct LifetimeOptions {
    double threshold = 1 / std::numbers::e;
    size_t window = 10;
};

struct Lifetime {
    double tau = 0;
    bool censored = false;
    /// Fractional period index of the crossing (n_max when censored).
    double crossing = 0;
};

/// Centered moving average of S(n) = (-1)^n values[n]; the window is cut at
/// both ends of the series.
inline std::vector<double> staggered_envelope(const std::vector<double> &values, size_t window) {
    if (window == 0) throw Error("envelope window must be >= 1");
    const size_t n = values.size();
    const size_t lo = (window - 1) / 2, hi = window - 1 - lo;
    std::vector<double> s(n), prefix(n + 1, 0.0), out(n);
    for (size_t i = 0; i < n; ++i) {
        s[i] = (i % 2 ? -1.0 : 1.0) * values[i];
        prefix[i + 1] = prefix[i] + s[i];
    }
    for (size_t i = 0; i < n; ++i) {
        size_t a = i >= lo ? i - lo : 0, b = std::min(n - 1, i + hi);
        out[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
    }
    return out;
}

/// First time the staggered envelope drops below the threshold, linearly
/// interpolated between the bracketing periods.
inline Lifetime lifetime(const TimeSeries &series, const LifetimeOptions &opt = {}) {
    if (series.values.empty()) throw EmptySeries("lifetime of an empty series");
    if (!(opt.threshold > 0 && opt.threshold < 1)) throw Error("lifetime threshold must lie in (0, 1)");
    auto env = staggered_envelope(series.values, opt.window);
    for (size_t n = 0; n < env.size(); ++n) {
        double a = std::abs(env[n]);
        if (a >= opt.threshold) continue;
        double x = static_cast<double>(n);
        if (n > 0) {
            double prev = std::abs(env[n - 1]);
            x = static_cast<double>(n - 1) + (prev - opt.threshold) / (prev - a);
        }
        return {series.period * x, false, x};
    }
    double last = static_cast<double>(series.n_max());
    return {series.period * last, true, last};
}

inline Lifetime lifetime(const TimeSeries &series, double threshold, size_t window) {
    return lifetime(series, LifetimeOptions{threshold, window});
}

/// Streaming form of the lifetime test, for stopping runs early: crossed()
/// turns true once a period whose full window is available lies below the
/// threshold. Every envelope value up to that period then equals its value in
/// any longer run, so the lifetime is unchanged by stopping.
class LifetimeMonitor {
   public:
    explicit LifetimeMonitor(const LifetimeOptions &opt = {}) : opt_(opt) {
    }

    void push(double value) {
        const size_t n = s_.size();
        s_.push_back((n % 2 ? -1.0 : 1.0) * value);
        if (crossed_) return;
        const size_t lo = (opt_.window - 1) / 2, hi = opt_.window - 1 - lo;
        if (n < hi) return;
        const size_t m = n - hi;
        const size_t a = m >= lo ? m - lo : 0;
        double sum = 0;
        for (size_t i = a; i <= n; ++i) sum += s_[i];
        if (std::abs(sum / static_cast<double>(n - a + 1)) < opt_.threshold) crossed_ = true;
    }
    bool crossed() const {
        return crossed_;
    }

   private:
    LifetimeOptions opt_;
    std::vector<double> s_;
    bool crossed_ = false;
};

enum class InitialState {
    /// Corner-polarized state of the low manifold of H_eff.
    kCornerPolarized,
    /// All spins up, |0...0>.
    kAllUp,
};

struct SweepOptions {
    LifetimeOptions lifetime;
    KrylovOptions krylov;
    EigenOptions eigen;
    InitialState initial = InitialState::kCornerPolarized;
    /// Stop each trajectory once every tracked lifetime is determined.
    bool stop_after_crossing = true;
    size_t workers = 1;
};

inline StateVector initial_state(const Lattice &L, const FloquetProtocol &p, InitialState kind,
                                 const EigenOptions &eigen = {}) {
    if (kind == InitialState::kAllUp) return StateVector(L.num_sites());
    return corner_polarized_ground_state(L, build_heff(L, p), eigen);
}

namespace detail {

/// Autocorrelation series of `ops` from `psi`, stopped early once all
/// lifetimes are determined (if requested).
inline std::vector<TimeSeries> lifetime_run(const Lattice &L, const FloquetProtocol &p, const StateVector &psi,
                                            const std::vector<LabeledObservable> &ops, size_t n_max,
                                            const SweepOptions &opt) {
    TrajectoryOptions t;
    t.krylov = opt.krylov;
    std::vector<LifetimeMonitor> monitors(ops.size(), LifetimeMonitor(opt.lifetime));
    if (opt.stop_after_crossing) {
        t.keep_going = [&](size_t n, const TrajectoryResult &r) {
            bool all = true;
            for (size_t k = 0; k < ops.size(); ++k) {
                monitors[k].push(r.autocorrelations[k].values[n]);
                all = all && monitors[k].crossed();
            }
            return !all;
        };
    }
    return run_trajectory(L, p, psi, ops, {}, n_max, t).autocorrelations;
}

}  // namespace detail

struct FrequencyRow {
    double omega = 0;
    Lifetime lifetime;
    size_t periods = 0;
};

/// Lifetime of `observable` for each drive frequency, with the same initial
/// state for every row.
inline std::vector<FrequencyRow> frequency_sweep(const Lattice &L, const FloquetProtocol &p,
                                                 const std::vector<double> &omegas, const PauliString &observable,
                                                 size_t n_max, const SweepOptions &opt = {}) {
    if (omegas.size() < 2) throw Error("frequency sweep needs at least two frequencies");
    const StateVector psi = initial_state(L, p, opt.initial, opt.eigen);
    return parallel_map(omegas.size(), opt.workers, [&](size_t i) {
        FloquetProtocol q = p;
        q.Omega = omegas[i];
        auto ts = detail::lifetime_run(L, q, psi, {{observable.str(), observable}}, n_max, opt).front();
        return FrequencyRow{omegas[i], lifetime(ts, opt.lifetime), ts.n_max()};
    });
}

struct DimerizationRow {
    double eta = 0;
    Lifetime corner;
    Lifetime bulk;
    size_t periods = 0;
};

/// The bulk control site: the first blue bulk site (its stabilizer strength
/// J_b is held fixed while eta varies).
inline size_t bulk_control_site(const Lattice &L) {
    for (size_t i : L.sites_of(SiteClass::kBulk)) {
        if (L.color(i) == Color::kBlue) return i;
    }
    throw UnsupportedGeometry("lattice has no blue bulk site");
}

/// Corner Z~ and bulk sigma^z lifetimes from the all-up state for J_r = eta J_b.
inline std::vector<DimerizationRow> dimerization_sweep(const Lattice &L, const FloquetProtocol &p,
                                                       const std::vector<double> &etas, size_t n_max,
                                                       const SweepOptions &opt = {}) {
    const auto z = corner_operators(L).z_tilde;
    const auto bulk = PauliString::single(L.num_sites(), bulk_control_site(L), 'Z');
    const StateVector up(L.num_sites());
    return parallel_map(etas.size(), opt.workers, [&](size_t i) {
        FloquetProtocol q = p;
        q.J_r = etas[i] * p.J_b;
        auto ts = detail::lifetime_run(L, q, up, {{"corner", z}, {"bulk", bulk}}, n_max, opt);
        return DimerizationRow{etas[i], lifetime(ts[0], opt.lifetime), lifetime(ts[1], opt.lifetime), ts[0].n_max()};
    });
}

enum class ScanParameter { kVzz, kVxx };

struct PhaseRow {
    double value = 0;
    OrderParameters order;
};

inline std::vector<PhaseRow> phase_scan(const Lattice &L, const FloquetProtocol &p, ScanParameter which,
                                        const std::vector<double> &grid, const SweepOptions &opt = {}) {
    if (!std::is_sorted(grid.begin(), grid.end())) throw Error("phase scan grid must be sorted");
    return parallel_map(grid.size(), opt.workers, [&](size_t i) {
        FloquetProtocol q = p;
        (which == ScanParameter::kVzz ? q.V_zz : q.V_xx) = grid[i];
        return PhaseRow{grid[i], order_parameters(L, build_heff(L, q), opt.eigen)};
    });
}

/// Points where the piecewise-linear curves a(x) and b(x) cross.
inline std::vector<double> find_crossings(const std::vector<double> &x, const std::vector<double> &a,
                                          const std::vector<double> &b) {
    if (x.size() != a.size() || x.size() != b.size()) throw GridMismatch("crossing curves differ in length");
    std::vector<double> out;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
        if (d0 == 0) {
            out.push_back(x[i]);
            continue;
        }
        if (d0 * d1 < 0) out.push_back(x[i] + (x[i + 1] - x[i]) * d0 / (d0 - d1));
    }
    if (!x.empty() && a.back() == b.back()) out.push_back(x.back());
    return out;
}

/// First crossing of |a| and |b|, the boundary estimate between the phases
/// the two order parameters detect.
inline std::optional<double> phase_boundary(const std::vector<double> &x, const std::vector<double> &a,
                                            const std::vector<double> &b) {
    std::vector<double> aa(a.size()), bb(b.size());
    std::transform(a.begin(), a.end(), aa.begin(), [](double v) { return std::abs(v); });
    std::transform(b.begin(), b.end(), bb.begin(), [](double v) { return std::abs(v); });
    auto c = find_crossings(x, aa, bb);
    if (c.empty()) return std::nullopt;
    return c.front();
}

/// Indices whose lifetime is below every existing grid neighbour. A censored
/// lifetime is only a lower bound, so it never counts as a minimum itself.
inline std::vector<size_t> local_minima(const std::vector<Lifetime> &v) {
    std::vector<size_t> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i].censored) continue;
        bool left = i == 0 || v[i].tau < v[i - 1].tau;
        bool right = i + 1 == v.size() || v[i].tau < v[i + 1].tau;
        if (left && right && v.size() > 1) out.push_back(i);
    }
    return out;
}

struct BeatEstimate {
    double omega = 0;
    double first_zero = 0;
    bool found = false;
};

/// Angular frequency of a slow modulation S(n) = (-1)^n values[n] ~ cos(w t),
/// from the first zero of the smoothed envelope: w = pi / (2 t0).
inline BeatEstimate beat_frequency(const TimeSeries &series, size_t window = 10) {
    if (series.values.empty()) throw EmptySeries("beat frequency of an empty series");
    auto env = staggered_envelope(series.values, window);
    for (size_t n = 1; n < env.size(); ++n) {
        if (env[n - 1] > 0 && env[n] <= 0) {
            double x = static_cast<double>(n - 1) + env[n - 1] / (env[n - 1] - env[n]);
            double t0 = x * series.period;
            return {std::numbers::pi / (2 * t0), t0, true};
        }
    }
    return {};
}

struct BoundarySample {
    double v = 0;
    double f = 0;
};

/// max |f1(v)/v - f2(1/v)| over the f1 samples. Every f1 sample at v needs an
/// f2 sample at 1/v.
inline double duality_relation_check(const std::vector<BoundarySample> &f1, const std::vector<BoundarySample> &f2,
                                     double grid_tolerance = 1e-9) {
    if (f1.empty() || f1.size() != f2.size()) throw GridMismatch("f1 and f2 grids differ in size");
    double worst = 0;
    for (const auto &s : f1) {
        if (!(s.v > 0)) throw GridMismatch("duality relation needs positive V_zz");
        const double inv = 1 / s.v;
        auto it = std::find_if(f2.begin(), f2.end(), [&](const BoundarySample &t) {
            return std::abs(t.v - inv) <= grid_tolerance * std::max(1.0, inv);
        });
        if (it == f2.end()) throw GridMismatch("no f2 sample at 1/" + format_real(s.v));
        worst = std::max(worst, std::abs(s.f / s.v - it->f));
    }
    return worst;
}

}  // namespace cornerdtc
