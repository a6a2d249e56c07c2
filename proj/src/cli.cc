// Copyright 2026 The cvbell Authors
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

#include "cvbell/cli.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "cvbell/bell_analysis.h"
#include "cvbell/fock_core.h"
#include "cvbell/lhv_wigner.h"
#include "cvbell/number_format.h"
#include "cvbell/records_io.h"

namespace cvbell::cli {

using protocol::ConfigError;
using protocol::ExperimentConfig;

ExperimentConfig parse_config(const std::optional<std::filesystem::path> &config_path, const ConfigOverrides &overrides) {
    nlohmann::json file_values = nlohmann::json::object();
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) {
            throw ConfigError("config", "cannot open '" + config_path->string() + "'");
        }
        try {
            file_values = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw ConfigError("config", std::string("not valid JSON: ") + e.what());
        }
    }
    if (overrides.trials) {
        file_values["trials"] = *overrides.trials;
    }
    if (overrides.seed) {
        file_values["seed"] = *overrides.seed;
    }
    if (overrides.model) {
        file_values["model"] = std::string(protocol::model_selection_name(*overrides.model));
    }
    return protocol::config_from_json(file_values);
}

std::vector<VerifyCheck> run_identity_checks(const VerifyOptions &options) {
    using fock::OperatorKind;
    std::vector<VerifyCheck> checks;
    double scale = options.drop_quarter ? 1.0 : 0.25;
    for (size_t n : options.truncations) {
        auto space = fock::build_space({ModeId::A_H, ModeId::V_A}, n);
        std::string suffix = " N=" + std::to_string(n);
        std::string note = n == 2 ? "guarded subspace is the vacuum only" : "";
        size_t guard = n - 2;

        checks.push_back(
            {"R = n_A - n_VA" + suffix,
             fock::verify_count_rate_identity(space, ModeId::A_H, ModeId::V_A, true, scale), 1e-12, note});

        auto id = fock::identity_operator(space);
        double commutator = 0;
        double quadrature_sum = 0;
        for (ModeId m : space.modes()) {
            auto a = fock::mode_operator(space, m, OperatorKind::annihilate);
            auto ad = fock::mode_operator(space, m, OperatorKind::create);
            commutator = std::max(commutator, fock::guarded_deviation(a * ad - ad * a, id, guard));
            auto x1 = fock::mode_operator(space, m, OperatorKind::x1);
            auto x2 = fock::mode_operator(space, m, OperatorKind::x2);
            auto number = fock::mode_operator(space, m, OperatorKind::number);
            quadrature_sum = std::max(
                quadrature_sum,
                fock::guarded_deviation(x1 * x1 + x2 * x2, number.scaled(4) + id.scaled(2), guard));
        }
        checks.push_back({"[a, a^dagger] = 1" + suffix, commutator, 1e-12, note});
        checks.push_back({"X1^2 + X2^2 = 4n + 2" + suffix, quadrature_sum, 1e-12, note});
    }

    SplitMix64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 2.0);
    std::vector<ModeId> modes(ALL_MODES.begin(), ALL_MODES.end());
    double worst = 0;
    for (size_t k = 0; k < options.cnumber_points; k++) {
        std::vector<double> coords(2 * modes.size());
        for (double &c : coords) {
            c = normal(rng);
        }
        lhv::PhaseSpacePoint p(modes, std::move(coords));
        for (auto [s, v] : {std::pair{ModeId::A_H, ModeId::V_A}, std::pair{ModeId::B_V, ModeId::V_B}}) {
            double quadrature_form = lhv::cnumber_count_rate(p, s, v) * (scale / 0.25);
            worst = std::max(worst, std::abs(quadrature_form - lhv::cnumber_count_rate_from_amplitudes(p, s, v)));
        }
    }
    checks.push_back(
        {"c-number R = |alpha|^2 - |v|^2 (" + std::to_string(options.cnumber_points) + " points)", worst, 1e-12, ""});
    return checks;
}

int cmd_verify(const VerifyOptions &options, std::ostream &out) {
    auto checks = run_identity_checks(options);
    bool all = true;
    char line[256];
    std::snprintf(line, sizeof(line), "%-44s %12s %10s  %s\n", "check", "max dev", "tolerance", "result");
    out << line;
    for (const auto &c : checks) {
        std::snprintf(
            line, sizeof(line), "%-44s %12.3e %10.0e  %s", c.name.c_str(), c.deviation, c.tolerance,
            c.passed() ? "PASS" : "FAIL");
        out << line;
        if (!c.note.empty()) {
            out << "  (" << c.note << ")";
        }
        out << '\n';
        all = all && c.passed();
    }
    out << (all ? "all identity checks passed\n" : "identity check FAILED\n");
    return all ? EXIT_OK : EXIT_FAILURE_ANALYSIS;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["config"] = protocol::config_to_json(config);
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto &p : artifacts) {
        j["artifacts"].push_back(p.string());
    }
    j["wall_seconds"] = wall_seconds;
    return j;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_manifest(const RunManifest &manifest, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    out << manifest.to_json().dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("Failed writing " + path.string() + ".");
    }
}

void print_simulation_summary(const protocol::RecordSet &rs, std::ostream &out) {
    out << "model " << protocol::model_name(rs.model) << ": " << rs.records.size() << " trials\n";
    for (Station station : {Station::A, Station::B}) {
        std::map<std::string, size_t> counts;
        for (const auto &s : protocol::station_settings(rs.config, station)) {
            counts[s.encode()] = 0;
        }
        size_t nonzero_aux = 0;
        for (const auto &r : rs.records) {
            const auto &s = r.setting(station);
            counts[s.encode()]++;
            if (s.is_aux() && r.outcome(station) != 0.0) {
                nonzero_aux++;
            }
        }
        for (const auto &[name, n] : counts) {
            out << "  " << name << "  " << n << '\n';
        }
        out << "  station " << station_letter(station) << ": " << nonzero_aux << " nonzero aux outcomes\n";
    }
}

}  // namespace

RunManifest cmd_simulate(
    const ExperimentConfig &config, const std::filesystem::path &out_dir, size_t threads, std::ostream &out) {
    auto start = Clock::now();
    config.validate();
    std::filesystem::create_directories(out_dir);
    RunManifest manifest{config, {}, std::string(TOOL_VERSION), 0};
    for (const auto &rs : protocol::run_experiments(config, threads)) {
        auto csv = out_dir / ("records_" + std::string(protocol::model_name(rs.model)) + ".csv");
        protocol::save_record_set(rs, csv);
        manifest.artifacts.push_back(csv);
        manifest.artifacts.push_back(protocol::sidecar_path(csv));
        print_simulation_summary(rs, out);
    }
    manifest.wall_seconds = seconds_since(start);
    write_manifest(manifest, out_dir / "manifest_simulate.json");
    return manifest;
}

RunManifest cmd_report(
    const std::vector<std::filesystem::path> &record_paths, const std::filesystem::path &out_dir, std::ostream &out) {
    auto start = Clock::now();
    if (record_paths.empty()) {
        throw IncompatibleRecordsError("report needs at least one records file.");
    }
    std::vector<protocol::RecordSet> sets;
    for (const auto &p : record_paths) {
        sets.push_back(protocol::load_record_set(p));
    }
    // The config snapshot must agree apart from which models were requested.
    auto comparable = [](const ExperimentConfig &c) {
        auto j = protocol::config_to_json(c);
        j.erase("model");
        return j;
    };
    for (size_t k = 1; k < sets.size(); k++) {
        if (comparable(sets[k].config) != comparable(sets[0].config)) {
            throw IncompatibleRecordsError(
                "incompatible configs: " + record_paths[k].string() + " and " + record_paths[0].string() +
                " come from different experiment configurations.");
        }
        for (size_t m = 0; m < k; m++) {
            if (sets[m].model == sets[k].model) {
                throw IncompatibleRecordsError("two records files for the same model were given.");
            }
        }
    }
    const auto &config = sets[0].config;

    auto oracle = bell::oracle_summary(config);
    std::vector<bell::BellReport> reports;
    for (const auto &rs : sets) {
        reports.push_back(bell::analyze(rs));
    }

    std::filesystem::create_directories(out_dir);
    RunManifest manifest{config, {}, std::string(TOOL_VERSION), 0};
    auto json_path = out_dir / "report.json";
    {
        std::ofstream f(json_path, std::ios::binary);
        f << bell::report_to_json(config, oracle, reports).dump(2) << '\n';
        if (!f) throw std::runtime_error("Failed writing " + json_path.string() + ".");
    }
    auto csv_path = out_dir / "correlations.csv";
    {
        std::ofstream f(csv_path, std::ios::binary);
        bell::write_correlation_table(oracle, reports, f);
        if (!f) throw std::runtime_error("Failed writing " + csv_path.string() + ".");
    }
    manifest.artifacts = {json_path, csv_path};

    if (oracle.s) {
        out << "oracle S = " << format_double(*oracle.s) << (*oracle.s > 2 ? " (exceeds 2)" : " (does not exceed 2)")
            << '\n';
    } else if (!oracle.error.empty()) {
        out << "oracle: " << oracle.error << '\n';
    }
    for (const auto &r : reports) {
        out << "[" << protocol::model_name(r.model) << "]\n";
        if (r.chsh) {
            out << "  S = " << format_double(r.chsh->s) << " +/- " << format_double(r.chsh->standard_error) << '\n';
        }
        if (r.positivity) {
            for (auto [name, a] : {std::pair{"A", r.positivity->a}, std::pair{"B", r.positivity->b}}) {
                out << "  positivity " << name << ": negative fraction " << format_double(a.negative_fraction)
                    << ", min R " << format_double(a.min_count_rate) << ", mean R "
                    << format_double(a.mean_count_rate) << " +/- " << format_double(a.mean_standard_error) << '\n';
            }
        }
        if (r.vacuum) {
            out << "  vacuum check: " << (r.vacuum->all_zero ? "PASS" : "FAIL") << " ("
                << r.vacuum->aux_trials_a + r.vacuum->aux_trials_b << " aux outcomes, " << r.vacuum->nonzero_outcomes
                << " nonzero, mean intensity " << format_double(r.vacuum->mean_intensity) << ")\n";
        } else {
            out << "  vacuum check: " << r.vacuum_error << '\n';
        }
    }
    manifest.wall_seconds = seconds_since(start);
    write_manifest(manifest, out_dir / "manifest_report.json");
    return manifest;
}

int run(int argc, char **argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Continuous-variable Bell test simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(TOOL_VERSION));

    VerifyOptions verify_options;
    std::string fault;
    auto *verify = app.add_subcommand("verify", "Check the count-rate operator identities");
    verify->add_option("--truncation", verify_options.truncations, "Fock truncations to check")->check(CLI::Range(2, 16));
    verify->add_option("--points", verify_options.cnumber_points, "Random phase-space points for the c-number check");
    verify->add_option("--inject-fault", fault, "Test hook")->check(CLI::IsMember({"drop-quarter"}))->group("");

    std::string config_path;
    uint64_t trials = 0;
    uint64_t seed = 0;
    std::string model;
    std::string out_dir = ".";
    auto *simulate = app.add_subcommand("simulate", "Run the measurement protocol and write records");
    simulate->add_option("--config", config_path, "JSON configuration file");
    auto *trials_opt = simulate->add_option("--trials", trials, "Number of trials");
    auto *seed_opt = simulate->add_option("--seed", seed, "Master seed");
    auto *model_opt =
        simulate->add_option("--model", model, "quantum, lhv or both")->check(CLI::IsMember({"quantum", "lhv", "both"}));
    simulate->add_option("--out", out_dir, "Output directory");

    std::vector<std::string> record_files;
    std::string report_out = ".";
    auto *report = app.add_subcommand("report", "Analyze records and write the Bell report");
    report->add_option("records", record_files, "records_<model>.csv files")->required();
    report->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    try {
        if (verify->parsed()) {
            verify_options.drop_quarter = fault == "drop-quarter";
            return cmd_verify(verify_options, out);
        }
        if (simulate->parsed()) {
            ConfigOverrides overrides;
            if (trials_opt->count()) overrides.trials = trials;
            if (seed_opt->count()) overrides.seed = seed;
            if (model_opt->count()) overrides.model = protocol::model_selection_from_name(model);
            std::optional<std::filesystem::path> path;
            if (!config_path.empty()) path = config_path;
            auto config = parse_config(path, overrides);
            size_t threads = protocol::worker_threads_from_env();
            auto manifest = cmd_simulate(config, out_dir, threads, out);
            out << "wrote " << manifest.artifacts.size() << " files to " << out_dir << '\n';
            return EXIT_OK;
        }
        if (report->parsed()) {
            std::vector<std::filesystem::path> paths(record_files.begin(), record_files.end());
            cmd_report(paths, report_out, out);
            return EXIT_OK;
        }
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return EXIT_USAGE;
    } catch (const protocol::SchemaError &e) {
        err << "schema error: " << e.what() << '\n';
        return EXIT_USAGE;
    } catch (const IncompatibleRecordsError &e) {
        err << "error: " << e.what() << '\n';
        return EXIT_USAGE;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return EXIT_FAILURE_ANALYSIS;
    }
    return EXIT_USAGE;
}

}  // namespace cvbell::cli
