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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "cornerdtc/experiments.hpp"
#include "presets.hpp"

namespace fs = std::filesystem;
using namespace cornerdtc;

namespace {

struct Overrides {
    std::string out;
    size_t workers = 0;
    std::optional<uint64_t> seed;

    void apply(RunConfig &c) const {
        if (!out.empty()) c.output = out;
        if (workers > 0) c.workers = workers;
        if (seed) c.seed = seed;
    }
};

RunConfig load(const std::string &path, const Overrides &ov) {
    return load_config(read_file(path), [&](RunConfig &c) { ov.apply(c); });
}

void print_result(const RunResult &r) {
    std::cout << "fingerprint " << r.fingerprint << "\n";
    for (const auto &f : r.files) std::cout << "wrote " << f.string() << "\n";
    std::cout << r.summary;
    std::printf("wall time %.1f s\n", r.seconds);
}

std::vector<std::vector<std::string>> read_table(const fs::path &f) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_file(f));
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string verdict(bool ok) {
    return ok ? "PASS" : "FAIL";
}

// Checks of a reproduced figure against the desk-scale expectations.
std::string judge(const std::string &figure, const fs::path &root) {
    std::ostringstream s;
    if (figure == "fig1d") {
        for (const char *size : {"eight_sites", "twelve_sites"}) {
            std::map<double, double> tau;
            for (const auto &r : read_table(root / size / "frequency_sweep.csv")) tau[std::stod(r[0])] = std::stod(r[1]);
            double ratio = tau[4] / tau[1];
            s << verdict(ratio >= 10) << " " << size << ": tau(Omega=4) / tau(Omega=1) = " << format_real(ratio)
              << " (want >= 10)\n";
        }
    } else if (figure == "fig2ab") {
        std::vector<double> x, m, zz;
        for (const auto &r : read_table(root / "vzz" / "phase_scan.csv")) {
            x.push_back(std::stod(r[0]));
            m.push_back(std::abs(std::stod(r[1])));
            zz.push_back(std::abs(std::stod(r[2])));
        }
        auto c = find_crossings(x, m, zz);
        bool neg = false, pos = false;
        for (double v : c) {
            neg = neg || std::abs(v + 1) <= 0.3;
            pos = pos || std::abs(v - 1) <= 0.3;
        }
        s << verdict(neg && pos) << " |O_m| and |zz| cross within 0.3 of -1 and +1 (" << c.size() << " crossings)\n";
    } else if (figure == "fig3ab") {
        std::vector<double> eta;
        std::vector<Lifetime> corner, bulk;
        for (const auto &r : read_table(root / "eta_scan" / "dimerization_sweep.csv")) {
            eta.push_back(std::stod(r[0]));
            corner.push_back({std::stod(r[1]), r[2] == "1", 0});
            bulk.push_back({std::stod(r[3]), r[4] == "1", 0});
        }
        double ratio = corner.back().tau / corner.front().tau;
        double bulk_ratio = std::max(bulk.back().tau, bulk.front().tau) / std::min(bulk.back().tau, bulk.front().tau);
        s << verdict(ratio >= 10) << " corner tau(eta=" << format_real(eta.back()) << ") / tau(eta=1) = "
          << format_real(ratio) << (corner.back().censored ? " (lower bound)" : "") << "\n";
        s << verdict(bulk_ratio < 2) << " bulk tau changes by a factor " << format_real(bulk_ratio) << "\n";
        auto mins = local_minima(corner);
        auto has = [&](double e) {
            for (size_t i : mins) {
                if (std::abs(eta[i] - e) < 1e-9) return true;
            }
            return false;
        };
        s << verdict(has(1) && has(3)) << " local minima of the corner lifetime at eta = 1 and 3\n";
    } else {
        s << "no acceptance checks for " << figure << "\n";
    }
    return s.str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact simulation of corner-mode time crystals in a driven checkerboard spin model"};
    app.require_subcommand(1);
    Overrides ov;
    auto add_overrides = [&](CLI::App *sub) {
        sub->add_option("--out", ov.out, "Output directory");
        sub->add_option("--workers", ov.workers, "Worker threads for sweeps and trajectories");
        sub->add_option("--seed", ov.seed, "Master seed for noisy circuit runs");
    };

    std::string config_path;
    auto *run = app.add_subcommand("run", "Run the experiment a config file (or manifest) describes");
    run->add_option("--config", config_path, "Config file or manifest.json")->required();
    add_overrides(run);

    std::string figure;
    bool print_only = false;
    auto *repro = app.add_subcommand("reproduce", "Run the bundled desk-scale configs for a figure");
    repro->add_option("figure", figure, "fig1b, fig1d, fig2ab or fig3ab")
        ->required()
        ->check(CLI::IsMember({"fig1b", "fig1d", "fig2ab", "fig3ab"}));
    repro->add_flag("--print-config", print_only, "Print the bundled configs and exit");
    add_overrides(repro);

    auto *validate = app.add_subcommand("validate-config", "Check a config and print its resolved form");
    validate->add_option("--config", config_path, "Config file or manifest.json")->required();
    add_overrides(validate);

    std::string which = "period";
    auto *exportc = app.add_subcommand("export-circuit", "Write a compiled circuit as text");
    exportc->add_option("--config", config_path, "Config file or manifest.json")->required();
    exportc->add_option("--circuit", which, "period, U1, U2, perturbations, ground or echo")
        ->check(CLI::IsMember({"period", "U1", "U2", "perturbations", "ground", "echo"}));
    add_overrides(exportc);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto c = load(config_path, ov);
            print_result(run_experiment(c));
        } else if (*validate) {
            auto c = load(config_path, ov);
            std::cout << "# fingerprint " << config_fingerprint(c) << "\n" << config_text(c);
        } else if (*exportc) {
            auto c = load(config_path, ov);
            const Lattice L = build_lattice(c.lattice);
            const double dt = c.protocol.period() / 2 / static_cast<double>(c.substeps);
            Circuit circ(L);
            if (which == "period") circ = compile_period(L, c.protocol, c.substeps, c.pulse_angle);
            if (which == "U1") circ = compile_U1(L, c.protocol, c.pulse_angle);
            if (which == "U2") circ = compile_U2(L, c.protocol, dt);
            if (which == "perturbations") circ = compile_perturbations(L, c.protocol, dt);
            if (which == "ground") circ = compile_Ugs(L);
            if (which == "echo") {
                circ = echo_circuit(preparation_circuit(L, c), compile_period(L, c.protocol, c.substeps, c.pulse_angle),
                                    c.n_max);
            }
            std::string text = "# circuit " + which + ", " + std::to_string(L.num_sites()) + " qubits, depth " +
                               std::to_string(circ.depth()) + ", gates " + std::to_string(circ.gate_count()) + "\n" +
                               circ.to_text();
            if (ov.out.empty()) {
                std::cout << text;
            } else {
                atomic_write(ov.out, text);
                std::cout << "wrote " << ov.out << "\n";
            }
        } else if (*repro) {
            std::vector<presets::Preset> list;
            if (figure == "fig1b") list = presets::fig1b();
            if (figure == "fig1d") list = presets::fig1d();
            if (figure == "fig2ab") list = presets::fig2ab();
            if (figure == "fig3ab") list = presets::fig3ab();
            if (print_only) {
                for (const auto &p : list) std::cout << "### " << p.name << "\n" << p.config << "\n";
                return 0;
            }
            fs::path root = ov.out.empty() ? fs::path("reproduce") / figure : fs::path(ov.out);
            for (const auto &p : list) {
                Overrides sub = ov;
                sub.out = (root / p.name).string();
                auto c = parse_config(p.config, [&](RunConfig &x) { sub.apply(x); });
                std::cout << "== " << figure << "/" << p.name << "\n";
                print_result(run_experiment(c));
            }
            auto summary = judge(figure, root);
            atomic_write(root / "summary.txt", summary);
            std::cout << "== summary\n" << summary;
        }
    } catch (const ConfigInvalid &e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
