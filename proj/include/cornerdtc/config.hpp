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

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cornerdtc/analysis.hpp"
#include "cornerdtc/circuits.hpp"
#include "cornerdtc/io.hpp"

namespace cornerdtc {

enum class ExperimentKind {
    kDynamics,
    kFrequencySweep,
    kDimerizationSweep,
    kPhaseScan,
    kGap,
    kCircuitDynamics,
    kEcho,
};

enum class InitialPolicy { kGround, kAllUp, kCustomProduct };

/// Everything a run needs. Defaults describe a 12-site dynamics run at the
/// unperturbed fixed point.
struct RunConfig {
    LatticeSpec lattice;
    FloquetProtocol protocol;

    ExperimentKind kind = ExperimentKind::kDynamics;
    InitialPolicy initial = InitialPolicy::kGround;
    /// One '0' (up) or '1' (down) per site, for custom-product.
    std::string product;
    std::vector<std::string> observables = {"z_tilde"};
    size_t n_max = 100;
    std::vector<double> omegas;
    std::vector<double> etas;
    ScanParameter scan = ScanParameter::kVzz;
    std::vector<double> grid;
    size_t substeps = 1;
    PulseAngle pulse_angle = PulseAngle::kDriveConsistent;
    size_t echo_site = 0;

    double krylov_tolerance = 1e-10;
    double eigen_tolerance = 1e-10;
    double lifetime_threshold = 0.36787944117144233;
    size_t lifetime_window = 10;
    bool stop_after_crossing = true;

    double p1 = 0;
    double p2 = 0;
    size_t trajectories = 1;

    std::optional<uint64_t> seed;
    std::string output;
    size_t workers = 1;
};

inline const char *kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kDynamics:
            return "dynamics";
        case ExperimentKind::kFrequencySweep:
            return "frequency-sweep";
        case ExperimentKind::kDimerizationSweep:
            return "dimerization-sweep";
        case ExperimentKind::kPhaseScan:
            return "phase-scan";
        case ExperimentKind::kGap:
            return "gap";
        case ExperimentKind::kCircuitDynamics:
            return "circuit-dynamics";
        case ExperimentKind::kEcho:
            return "echo";
    }
    return "?";
}

inline const char *initial_name(InitialPolicy p) {
    switch (p) {
        case InitialPolicy::kGround:
            return "ground";
        case InitialPolicy::kAllUp:
            return "all-up";
        case InitialPolicy::kCustomProduct:
            return "custom-product";
    }
    return "?";
}

namespace detail {

inline std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::string join_reals(const std::vector<double> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_real(v[i]);
    return s;
}

inline std::string join_words(const std::vector<std::string> &v, const char *sep) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

}  // namespace detail

/// Resolves an observable name against a lattice: z_tilde, x_tilde, bulk_z,
/// K<i>, or a Pauli string such as "X0 Z6". "energy" is not a Pauli string
/// and yields nullopt.
inline std::optional<PauliString> resolve_observable(const Lattice &L, const std::string &name) {
    if (name == "energy") return std::nullopt;
    if (name == "z_tilde") return corner_operators(L).z_tilde;
    if (name == "x_tilde") return corner_operators(L).x_tilde;
    if (name == "bulk_z") return PauliString::single(L.num_sites(), bulk_control_site(L), 'Z');
    if (name.size() > 1 && name[0] == 'K') {
        size_t site = 0;
        auto r = std::from_chars(name.data() + 1, name.data() + name.size(), site);
        if (r.ec == std::errc() && r.ptr == name.data() + name.size()) return stabilizer_support(L, site);
    }
    auto p = PauliString::parse(name, L.num_sites());
    if (p.is_identity() || !p.is_hermitian()) throw ParseError("observable '" + name + "' is not a non-trivial Hermitian string");
    return p;
}

/// Canonical text of a config: every field, fixed order, shortest reals.
inline std::string config_text(const RunConfig &c) {
    std::ostringstream s;
    const auto &l = c.lattice;
    const auto &p = c.protocol;
    s << "[lattice]\n"
      << "blue = " << l.blue_dims[0] << " " << l.blue_dims[1] << "\n"
      << "red = " << l.red_dims[0] << " " << l.red_dims[1] << "\n"
      << "offset = " << format_real(l.red_offset[0]) << " " << format_real(l.red_offset[1]) << "\n\n";
    s << "[protocol]\n";
    std::istringstream pt(protocol_text(p));
    std::string line;
    while (std::getline(pt, line)) {
        auto eq = line.find('=');
        s << line.substr(0, eq) << " = " << line.substr(eq + 1) << "\n";
    }
    s << "\n[experiment]\n"
      << "kind = " << kind_name(c.kind) << "\n"
      << "initial = " << initial_name(c.initial) << "\n";
    if (!c.product.empty()) s << "product = " << c.product << "\n";
    s << "observables = " << detail::join_words(c.observables, ", ") << "\n"
      << "n_max = " << c.n_max << "\n";
    if (!c.omegas.empty()) s << "omegas = " << detail::join_reals(c.omegas) << "\n";
    if (!c.etas.empty()) s << "etas = " << detail::join_reals(c.etas) << "\n";
    if (c.kind == ExperimentKind::kPhaseScan || !c.grid.empty()) {
        s << "scan = " << (c.scan == ScanParameter::kVzz ? "V_zz" : "V_xx") << "\n"
          << "grid = " << detail::join_reals(c.grid) << "\n";
    }
    s << "substeps = " << c.substeps << "\n"
      << "pulse_angle = " << (c.pulse_angle == PulseAngle::kDriveConsistent ? "drive" : "reversed") << "\n"
      << "echo_site = " << c.echo_site << "\n\n";
    s << "[tolerances]\n"
      << "krylov = " << format_real(c.krylov_tolerance) << "\n"
      << "eigen = " << format_real(c.eigen_tolerance) << "\n"
      << "lifetime_threshold = " << format_real(c.lifetime_threshold) << "\n"
      << "lifetime_window = " << c.lifetime_window << "\n"
      << "stop_after_crossing = " << (c.stop_after_crossing ? "true" : "false") << "\n\n";
    s << "[noise]\n"
      << "p1 = " << format_real(c.p1) << "\n"
      << "p2 = " << format_real(c.p2) << "\n"
      << "trajectories = " << c.trajectories << "\n\n";
    s << "[run]\n";
    if (c.seed) s << "seed = " << *c.seed << "\n";
    if (!c.output.empty()) s << "output = " << c.output << "\n";
    s << "workers = " << c.workers << "\n";
    return s.str();
}

/// Hash of everything that can change results (output location and worker
/// count excluded).
inline std::string config_fingerprint(const RunConfig &c) {
    RunConfig k = c;
    k.output.clear();
    k.workers = 1;
    return hex64(fnv1a64(config_text(k)));
}

namespace detail {

class ConfigReader {
   public:
    using Setter = std::function<void(const std::string &value)>;

    void field(const std::string &section, const std::string &key, Setter set) {
        setters_[section + "." + key] = std::move(set);
    }

    std::map<std::string, size_t> read(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string raw, section;
        std::map<std::string, size_t> seen;
        size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigInvalid(lineno, line, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                bool known = false;
                for (const auto &[k, _] : setters_) known = known || k.rfind(section + ".", 0) == 0;
                if (!known) throw ConfigInvalid(lineno, section, "unknown section");
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigInvalid(lineno, line, "expected key = value");
            std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (section.empty()) throw ConfigInvalid(lineno, key, "key outside any section");
            std::string full = section + "." + key;
            auto it = setters_.find(full);
            if (it == setters_.end()) throw ConfigInvalid(lineno, full, "unknown key");
            if (seen.count(full)) throw ConfigInvalid(lineno, full, "duplicate key");
            seen[full] = lineno;
            try {
                it->second(value);
            } catch (const ConfigInvalid &) {
                throw;
            } catch (const std::exception &e) {
                throw ConfigInvalid(lineno, full, e.what());
            }
        }
        return seen;
    }

   private:
    std::map<std::string, Setter> setters_;
};

inline double parse_real(const std::string &s) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error("'" + s + "' is not a finite number");
    }
    return v;
}

inline uint64_t parse_count(const std::string &s) {
    uint64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error("'" + s + "' is not a non-negative integer");
    return v;
}

inline bool parse_bool(const std::string &s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw Error("expected true or false, got '" + s + "'");
}

inline std::vector<std::string> split_ws(const std::string &s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

inline std::vector<double> parse_reals(const std::string &s) {
    std::vector<double> out;
    for (const auto &t : split_ws(s)) out.push_back(parse_real(t));
    if (out.empty()) throw Error("expected at least one number");
    return out;
}

template <size_t N, class T, class F>
std::array<T, N> parse_fixed(const std::string &s, F parse) {
    auto words = split_ws(s);
    if (words.size() != N) throw Error("expected " + std::to_string(N) + " values");
    std::array<T, N> out{};
    for (size_t i = 0; i < N; ++i) out[i] = static_cast<T>(parse(words[i]));
    return out;
}

}  // namespace detail

/// Checks a config's cross-field consistency. `lines` maps "section.key" to
/// the line it came from, for diagnostics.
inline void validate_config(const RunConfig &c, const std::map<std::string, size_t> &lines = {}) {
    auto line_of = [&](const std::string &key) {
        auto it = lines.find(key);
        return it == lines.end() ? size_t{0} : it->second;
    };
    auto fail = [&](const std::string &key, const std::string &why) { return ConfigInvalid(line_of(key), key, why); };
    const auto &p = c.protocol;

    Lattice L;
    try {
        L = build_lattice(c.lattice);
    } catch (const Error &e) {
        throw fail("lattice.blue", e.what());
    }
    if (L.num_sites() > kMaxStateSites) throw fail("lattice.blue", "too many sites for a state vector");
    try {
        p.validate();
    } catch (const Error &e) {
        throw fail("protocol.Omega", e.what());
    }
    if (c.n_max == 0 && (c.kind == ExperimentKind::kDynamics || c.kind == ExperimentKind::kFrequencySweep ||
                         c.kind == ExperimentKind::kDimerizationSweep)) {
        throw fail("experiment.n_max", "must be positive");
    }
    if (c.initial == InitialPolicy::kCustomProduct) {
        if (c.product.size() != L.num_sites()) throw fail("experiment.product", "needs one digit per site");
    } else if (!c.product.empty()) {
        throw fail("experiment.product", "only valid with initial = custom-product");
    }
    bool needs_corner = false;
    for (const auto &o : c.observables) {
        try {
            resolve_observable(L, o);
        } catch (const Error &e) {
            throw fail("experiment.observables", e.what());
        }
        needs_corner = needs_corner || o == "z_tilde" || o == "x_tilde";
    }
    const bool circuit = c.kind == ExperimentKind::kCircuitDynamics || c.kind == ExperimentKind::kEcho;
    switch (c.kind) {
        case ExperimentKind::kFrequencySweep:
            if (c.initial == InitialPolicy::kCustomProduct) {
                throw fail("experiment.initial", "frequency sweeps start from ground or all-up");
            }
            if (c.omegas.size() < 2) throw fail("experiment.omegas", "needs at least two frequencies");
            for (double w : c.omegas) {
                if (!(w > 0)) throw fail("experiment.omegas", "frequencies must be positive");
            }
            if (resolve_observable(L, c.observables.front()) == std::nullopt) {
                throw fail("experiment.observables", "the swept observable must be a Pauli string");
            }
            break;
        case ExperimentKind::kDimerizationSweep:
            if (c.initial != InitialPolicy::kAllUp) throw fail("experiment.initial", "dimerization sweeps start all-up");
            if (c.etas.empty()) throw fail("experiment.etas", "needs at least one eta");
            if (c.protocol.J_b == 0) throw fail("protocol.J_b", "must be non-zero to scale by eta");
            needs_corner = true;
            try {
                bulk_control_site(L);
            } catch (const Error &e) {
                throw fail("lattice.blue", e.what());
            }
            break;
        case ExperimentKind::kPhaseScan:
            if (c.grid.empty()) throw fail("experiment.grid", "needs a grid");
            if (!std::is_sorted(c.grid.begin(), c.grid.end())) throw fail("experiment.grid", "must be sorted");
            try {
                order_parameter_operators(L);
            } catch (const Error &e) {
                throw fail("lattice.blue", e.what());
            }
            break;
        case ExperimentKind::kGap:
            needs_corner = true;
            break;
        default:
            break;
    }
    if (needs_corner && L.corners(Color::kBlue).empty()) throw fail("lattice.blue", "lattice has no blue corner");
    if (circuit) {
        for (const auto &o : c.observables) {
            if (o == "energy") throw fail("experiment.observables", "energy is not available for circuit runs");
        }
        if (c.substeps == 0) throw fail("experiment.substeps", "must be >= 1");
        if (c.initial == InitialPolicy::kGround) {
            try {
                compile_Ugs(L);
            } catch (const Error &e) {
                throw fail("experiment.initial", e.what());
            }
        }
        if (c.echo_site >= L.num_sites()) throw fail("experiment.echo_site", "out of range");
    }
    if (!(c.krylov_tolerance > 0)) throw fail("tolerances.krylov", "must be positive");
    if (!(c.eigen_tolerance > 0)) throw fail("tolerances.eigen", "must be positive");
    if (!(c.lifetime_threshold > 0 && c.lifetime_threshold < 1)) {
        throw fail("tolerances.lifetime_threshold", "must lie in (0, 1)");
    }
    if (c.lifetime_window == 0) throw fail("tolerances.lifetime_window", "must be >= 1");
    if (!(c.p1 >= 0 && c.p1 <= 1)) throw fail("noise.p1", "must lie in [0, 1]");
    if (!(c.p2 >= 0 && c.p2 <= 1)) throw fail("noise.p2", "must lie in [0, 1]");
    if (c.trajectories == 0) throw fail("noise.trajectories", "must be >= 1");
    if ((c.p1 > 0 || c.p2 > 0) && !circuit) throw fail("noise.p2", "noise applies to circuit runs only");
    if ((c.p1 > 0 || c.p2 > 0) && !c.seed) throw fail("run.seed", "noisy circuit runs need a seed");
    if (c.workers == 0) throw fail("run.workers", "must be >= 1");
}

/// Parses and fully validates a config. Unknown sections or keys, duplicate
/// keys, malformed values and inconsistent combinations all raise
/// ConfigInvalid before anything is computed.
/// `adjust`, if given, edits the parsed fields before validation (command-line
/// overrides).
inline RunConfig parse_config(std::string_view text, const std::function<void(RunConfig &)> &adjust = {}) {
    using namespace detail;
    RunConfig c;
    ConfigReader r;
    r.field("lattice", "blue", [&](const std::string &v) { c.lattice.blue_dims = parse_fixed<2, int>(v, parse_count); });
    r.field("lattice", "red", [&](const std::string &v) { c.lattice.red_dims = parse_fixed<2, int>(v, parse_count); });
    r.field("lattice", "offset",
            [&](const std::string &v) { c.lattice.red_offset = parse_fixed<2, double>(v, parse_real); });
    auto &p = c.protocol;
    for (auto [key, dst] : std::initializer_list<std::pair<const char *, double *>>{{"J_r", &p.J_r},
                                                                                    {"J_b", &p.J_b},
                                                                                    {"epsilon", &p.epsilon},
                                                                                    {"h_x", &p.h_x},
                                                                                    {"h_y", &p.h_y},
                                                                                    {"h_z", &p.h_z},
                                                                                    {"V_xx", &p.V_xx},
                                                                                    {"V_zz", &p.V_zz},
                                                                                    {"Omega", &p.Omega}}) {
        r.field("protocol", key, [dst](const std::string &v) { *dst = parse_real(v); });
    }
    r.field("protocol", "include_corner_K1", [&](const std::string &v) { p.include_corner_K1 = parse_bool(v); });

    r.field("experiment", "kind", [&](const std::string &v) {
        for (auto k : {ExperimentKind::kDynamics, ExperimentKind::kFrequencySweep, ExperimentKind::kDimerizationSweep,
                       ExperimentKind::kPhaseScan, ExperimentKind::kGap, ExperimentKind::kCircuitDynamics,
                       ExperimentKind::kEcho}) {
            if (v == kind_name(k)) {
                c.kind = k;
                return;
            }
        }
        throw Error("unknown experiment kind '" + v + "'");
    });
    r.field("experiment", "initial", [&](const std::string &v) {
        for (auto k : {InitialPolicy::kGround, InitialPolicy::kAllUp, InitialPolicy::kCustomProduct}) {
            if (v == initial_name(k)) {
                c.initial = k;
                return;
            }
        }
        throw Error("unknown initial state '" + v + "'");
    });
    r.field("experiment", "product", [&](const std::string &v) {
        if (v.empty() || v.find_first_not_of("01") != std::string::npos) throw Error("product must be a 0/1 string");
        c.product = v;
    });
    r.field("experiment", "observables", [&](const std::string &v) {
        c.observables.clear();
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) throw Error("empty observable");
            c.observables.push_back(item);
        }
        if (c.observables.empty()) throw Error("no observables");
    });
    r.field("experiment", "n_max", [&](const std::string &v) { c.n_max = parse_count(v); });
    r.field("experiment", "omegas", [&](const std::string &v) { c.omegas = parse_reals(v); });
    r.field("experiment", "etas", [&](const std::string &v) { c.etas = parse_reals(v); });
    r.field("experiment", "scan", [&](const std::string &v) {
        if (v == "V_zz") {
            c.scan = ScanParameter::kVzz;
        } else if (v == "V_xx") {
            c.scan = ScanParameter::kVxx;
        } else {
            throw Error("scan must be V_zz or V_xx");
        }
    });
    r.field("experiment", "grid", [&](const std::string &v) { c.grid = parse_reals(v); });
    r.field("experiment", "substeps", [&](const std::string &v) { c.substeps = parse_count(v); });
    r.field("experiment", "pulse_angle", [&](const std::string &v) {
        if (v == "drive") {
            c.pulse_angle = PulseAngle::kDriveConsistent;
        } else if (v == "reversed") {
            c.pulse_angle = PulseAngle::kReversed;
        } else {
            throw Error("pulse_angle must be drive or reversed");
        }
    });
    r.field("experiment", "echo_site", [&](const std::string &v) { c.echo_site = parse_count(v); });

    r.field("tolerances", "krylov", [&](const std::string &v) { c.krylov_tolerance = parse_real(v); });
    r.field("tolerances", "eigen", [&](const std::string &v) { c.eigen_tolerance = parse_real(v); });
    r.field("tolerances", "lifetime_threshold", [&](const std::string &v) { c.lifetime_threshold = parse_real(v); });
    r.field("tolerances", "lifetime_window", [&](const std::string &v) { c.lifetime_window = parse_count(v); });
    r.field("tolerances", "stop_after_crossing",
            [&](const std::string &v) { c.stop_after_crossing = parse_bool(v); });

    r.field("noise", "p1", [&](const std::string &v) { c.p1 = parse_real(v); });
    r.field("noise", "p2", [&](const std::string &v) { c.p2 = parse_real(v); });
    r.field("noise", "trajectories", [&](const std::string &v) { c.trajectories = parse_count(v); });

    r.field("run", "seed", [&](const std::string &v) { c.seed = parse_count(v); });
    r.field("run", "output", [&](const std::string &v) {
        if (v.empty()) throw Error("empty output path");
        c.output = v;
    });
    r.field("run", "workers", [&](const std::string &v) { c.workers = parse_count(v); });

    auto lines = r.read(text);
    if (adjust) adjust(c);
    validate_config(c, lines);
    return c;
}

}  // namespace cornerdtc
