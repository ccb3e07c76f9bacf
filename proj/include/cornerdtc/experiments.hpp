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

#include <chrono>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cornerdtc/config.hpp"

namespace cornerdtc {

struct RunResult {
    std::string fingerprint;
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
    std::string summary;
    double seconds = 0;
};

inline std::filesystem::path default_output(const RunConfig &c) {
    return std::filesystem::path("runs") / (std::string(kind_name(c.kind)) + "-" + config_fingerprint(c));
}

/// The initial state of an exact run.
inline StateVector exact_initial_state(const Lattice &L, const RunConfig &c, const EigenOptions &eigen) {
    const size_t n = L.num_sites();
    switch (c.initial) {
        case InitialPolicy::kAllUp:
            return StateVector(n);
        case InitialPolicy::kCustomProduct: {
            uint64_t bits = 0;
            for (size_t i = 0; i < n; ++i) bits |= uint64_t{c.product[i] == '1'} << i;
            return StateVector::basis_state(n, bits);
        }
        case InitialPolicy::kGround:
            break;
    }
    auto H = build_heff(L, c.protocol);
    if (!L.corners(Color::kBlue).empty()) return corner_polarized_ground_state(L, H, eigen);
    return ground_state(H, 1, eigen).vectors.front();
}

/// Preparation circuit from |0...0> for a circuit run.
inline Circuit preparation_circuit(const Lattice &L, const RunConfig &c) {
    switch (c.initial) {
        case InitialPolicy::kGround:
            return compile_Ugs(L);
        case InitialPolicy::kCustomProduct: {
            Circuit prep(L);
            for (size_t i = 0; i < L.num_sites(); ++i) {
                if (c.product[i] == '1') prep.add(Gate::x(i));
            }
            return prep;
        }
        case InitialPolicy::kAllUp:
            break;
    }
    return Circuit(L);
}

namespace detail {

inline std::string file_label(const std::string &name) {
    std::string s;
    for (char ch : name) s += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ? ch : '_';
    return s;
}

inline std::string lifetime_text(const Lifetime &lt, double period) {
    std::ostringstream s;
    s << (lt.censored ? ">= " : "") << format_real(lt.tau) << " (" << format_real(lt.tau / period) << " periods)";
    return s.str();
}

class RunWriter {
   public:
    RunWriter(std::filesystem::path dir, std::string header) : dir_(std::move(dir)), header_(std::move(header)) {
    }
    void write(const std::string &name, const std::string &body, size_t rows) {
        atomic_write(dir_ / name, body);
        files_.push_back(dir_ / name);
        manifest_files_.push_back({{"name", name}, {"rows", rows}});
    }
    const std::string &header() const {
        return header_;
    }
    std::vector<std::filesystem::path> files_;
    nlohmann::json manifest_files_ = nlohmann::json::array();

   private:
    std::filesystem::path dir_;
    std::string header_;
};

}  // namespace detail

/// Runs the experiment a validated config describes and writes its CSV files
/// and manifest.json to the output directory.
inline RunResult run_experiment(const RunConfig &c) {
    validate_config(c);
    const auto start = std::chrono::steady_clock::now();
    const Lattice L = build_lattice(c.lattice);
    const auto &p = c.protocol;
    RunResult result;
    result.fingerprint = config_fingerprint(c);
    result.directory = c.output.empty() ? default_output(c) : std::filesystem::path(c.output);

    KrylovOptions krylov;
    krylov.tolerance = c.krylov_tolerance;
    EigenOptions eigen;
    eigen.tolerance = c.eigen_tolerance;
    SweepOptions sweep;
    sweep.lifetime = {c.lifetime_threshold, c.lifetime_window};
    sweep.krylov = krylov;
    sweep.eigen = eigen;
    sweep.initial = c.initial == InitialPolicy::kAllUp ? InitialState::kAllUp : InitialState::kCornerPolarized;
    sweep.stop_after_crossing = c.stop_after_crossing;
    sweep.workers = c.workers;
    NoiseModel noise{c.p1, c.p2, c.trajectories, c.seed};

    const std::string comment = "# fingerprint=" + result.fingerprint + "\n# kind=" + kind_name(c.kind) + "\n";
    detail::RunWriter out(result.directory, comment);
    std::ostringstream summary;
    nlohmann::json flags = nlohmann::json::object();

    switch (c.kind) {
        case ExperimentKind::kDynamics: {
            const StateVector psi = exact_initial_state(L, c, eigen);
            std::vector<LabeledObservable> ops;
            bool energy = false;
            for (const auto &name : c.observables) {
                auto op = resolve_observable(L, name);
                if (op) {
                    ops.push_back({name, *op});
                } else {
                    energy = true;
                }
            }
            TrajectoryOptions t;
            t.krylov = krylov;
            TimeSeries heat;
            heat.label = "energy";
            heat.period = p.period();
            heat.protocol = p;
            std::optional<EnergyScale> scale;
            if (energy) {
                scale = energy_scale(L, p, eigen);
                t.on_state = [&](size_t, const StateVector &v) {
                    heat.values.push_back(energy_density(*scale, v));
                    heat.imag_residuals.push_back(0.0);
                };
            }
            auto r = run_trajectory(L, p, psi, ops, {}, c.n_max, t);
            size_t k = 0;
            for (const auto &name : c.observables) {
                const TimeSeries &ts = resolve_observable(L, name) ? r.autocorrelations[k++] : heat;
                out.write(detail::file_label(name) + ".csv", comment + to_csv(ts), ts.values.size());
                if (&ts != &heat) {
                    auto lt = lifetime(ts, sweep.lifetime);
                    flags[name] = lt.censored;
                    summary << "lifetime " << name << ": " << detail::lifetime_text(lt, p.period()) << "\n";
                }
            }
            break;
        }
        case ExperimentKind::kFrequencySweep: {
            auto op = *resolve_observable(L, c.observables.front());
            auto rows = frequency_sweep(L, p, c.omegas, op, c.n_max, sweep);
            std::string csv = comment + "omega,tau,tau_periods,censored,periods\n";
            for (const auto &row : rows) {
                double T = 2 * std::numbers::pi / row.omega;
                csv += format_real(row.omega) + "," + format_real(row.lifetime.tau) + "," +
                       format_real(row.lifetime.tau / T) + "," + (row.lifetime.censored ? "1" : "0") + "," +
                       std::to_string(row.periods) + "\n";
                flags["omega=" + format_real(row.omega)] = row.lifetime.censored;
                summary << "Omega " << format_real(row.omega) << ": tau "
                        << detail::lifetime_text(row.lifetime, T) << "\n";
            }
            out.write("frequency_sweep.csv", csv, rows.size());
            break;
        }
        case ExperimentKind::kDimerizationSweep: {
            auto rows = dimerization_sweep(L, p, c.etas, c.n_max, sweep);
            std::string csv = comment + "eta,tau_corner,censored_corner,tau_bulk,censored_bulk,periods\n";
            for (const auto &row : rows) {
                csv += format_real(row.eta) + "," + format_real(row.corner.tau) + "," +
                       (row.corner.censored ? "1" : "0") + "," + format_real(row.bulk.tau) + "," +
                       (row.bulk.censored ? "1" : "0") + "," + std::to_string(row.periods) + "\n";
                flags["eta=" + format_real(row.eta)] = row.corner.censored;
                summary << "eta " << format_real(row.eta) << ": corner "
                        << detail::lifetime_text(row.corner, p.period()) << ", bulk "
                        << detail::lifetime_text(row.bulk, p.period()) << "\n";
            }
            out.write("dimerization_sweep.csv", csv, rows.size());
            break;
        }
        case ExperimentKind::kPhaseScan: {
            auto rows = phase_scan(L, p, c.scan, c.grid, sweep);
            std::string csv = comment + "value,membrane,zz,xx,energy\n";
            std::vector<double> x, m, zz, xx;
            for (const auto &row : rows) {
                csv += format_real(row.value) + "," + format_real(row.order.membrane) + "," +
                       format_real(row.order.zz) + "," + format_real(row.order.xx) + "," +
                       format_real(row.order.energy) + "\n";
                x.push_back(row.value);
                m.push_back(std::abs(row.order.membrane));
                zz.push_back(std::abs(row.order.zz));
                xx.push_back(std::abs(row.order.xx));
            }
            out.write("phase_scan.csv", csv, rows.size());
            auto list = [](const std::vector<double> &v) {
                std::string s;
                for (double d : v) s += " " + format_real(d);
                return s.empty() ? std::string(" none") : s;
            };
            summary << "|membrane| = |zz| at" << list(find_crossings(x, m, zz)) << "\n"
                    << "|membrane| = |xx| at" << list(find_crossings(x, m, xx)) << "\n"
                    << "|zz| = |xx| at" << list(find_crossings(x, zz, xx)) << "\n";
            break;
        }
        case ExperimentKind::kGap: {
            auto H = build_heff(L, p);
            auto e = ground_state(H, 4, eigen);
            std::string csv = comment + "level,energy\n";
            for (size_t k = 0; k < e.values.size(); ++k) {
                csv += std::to_string(k) + "," + format_real(e.values[k] / 2) + "\n";
            }
            out.write("levels.csv", csv, e.values.size());
            double gap = finite_size_gap(H, corner_operators(L).z_tilde, eigen) / 2;
            summary << "finite-size gap " << format_real(gap) << "\n"
                    << "ground-manifold width " << format_real((e.values.back() - e.values.front()) / 2) << "\n";
            break;
        }
        case ExperimentKind::kCircuitDynamics: {
            auto prep = preparation_circuit(L, c);
            auto period = compile_period(L, p, c.substeps, c.pulse_angle);
            std::vector<PauliString> ops;
            for (const auto &name : c.observables) ops.push_back(*resolve_observable(L, name));
            auto rows = sample_dynamics(prep, period, StateVector(L.num_sites()), c.n_max, noise, ops, c.workers);
            for (size_t k = 0; k < ops.size(); ++k) {
                std::string csv = comment + "n,t,mean,standard_error\n";
                for (size_t n = 0; n < rows.size(); ++n) {
                    csv += std::to_string(n) + "," + format_real(n * p.period()) + "," + format_real(rows[n][k].mean) +
                           "," + format_real(rows[n][k].standard_error) + "\n";
                }
                out.write(detail::file_label(c.observables[k]) + ".csv", csv, rows.size());
            }
            summary << "circuit depth per period " << period.depth() << ", gates " << period.gate_count() << "\n";
            break;
        }
        case ExperimentKind::kEcho: {
            auto prep = preparation_circuit(L, c);
            auto period = compile_period(L, p, c.substeps, c.pulse_angle);
            auto rows = echo_series(prep, period, c.n_max, c.echo_site, noise, c.workers);
            std::string csv = comment + "n,t,echo,standard_error\n";
            for (size_t n = 0; n < rows.size(); ++n) {
                csv += std::to_string(n) + "," + format_real(n * p.period()) + "," + format_real(rows[n].mean) + "," +
                       format_real(rows[n].standard_error) + "\n";
            }
            out.write("echo.csv", csv, rows.size());
            summary << "echo after " << c.n_max << " periods " << format_real(rows.back().mean) << "\n";
            break;
        }
    }

    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.summary = summary.str();
    result.files = out.files_;
    nlohmann::json manifest = {{"fingerprint", result.fingerprint},
                               {"kind", kind_name(c.kind)},
                               {"config", config_text(c)},
                               {"files", out.manifest_files_},
                               {"censored", flags},
                               {"summary", result.summary},
                               {"wall_seconds", result.seconds}};
    atomic_write(result.directory / "manifest.json", manifest.dump(2) + "\n");
    result.files.push_back(result.directory / "manifest.json");
    return result;
}

/// Accepts either config text or a manifest written by run_experiment.
inline RunConfig load_config(std::string_view text, const std::function<void(RunConfig &)> &adjust = {}) {
    size_t i = text.find_first_not_of(" \t\r\n");
    if (i != std::string_view::npos && text[i] == '{') {
        nlohmann::json m;
        try {
            m = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
        }
        if (!m.contains("config") || !m["config"].is_string()) throw ParseError("manifest has no config");
        return parse_config(m["config"].get<std::string>(), adjust);
    }
    return parse_config(text, adjust);
}

}  // namespace cornerdtc
