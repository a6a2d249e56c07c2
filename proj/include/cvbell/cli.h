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

#ifndef _CVBELL_CLI_H
#define _CVBELL_CLI_H

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cvbell/protocol.h"

namespace cvbell::cli {

inline constexpr std::string_view TOOL_VERSION = "0.1.0";

/// Stable process exit codes.
enum ExitCode : int {
    EXIT_OK = 0,
    EXIT_FAILURE_ANALYSIS = 1,
    EXIT_USAGE = 2,
};

/// Command-line flags that take precedence over config-file values.
struct ConfigOverrides {
    std::optional<uint64_t> trials;
    std::optional<uint64_t> seed;
    std::optional<protocol::ModelSelection> model;
};

/// Defaults, then the JSON config file (strict keys), then flag overrides; validated.
protocol::ExperimentConfig parse_config(
    const std::optional<std::filesystem::path> &config_path, const ConfigOverrides &overrides = {});

struct VerifyOptions {
    std::vector<size_t> truncations{4, 8, 10};
    size_t cnumber_points = 100'000;
    uint64_t seed = protocol::DEFAULT_SEED;
    /// Test hook: build the count rate without its 1/4, which must break the identity.
    bool drop_quarter = false;
};

struct VerifyCheck {
    std::string name;
    double deviation;
    double tolerance;
    std::string note;
    bool passed() const {
        return deviation < tolerance;
    }
};

std::vector<VerifyCheck> run_identity_checks(const VerifyOptions &options);

/// Prints a pass/fail table; returns EXIT_OK iff every check passes.
int cmd_verify(const VerifyOptions &options, std::ostream &out);

struct RunManifest {
    protocol::ExperimentConfig config;
    std::vector<std::filesystem::path> artifacts;
    std::string tool_version;
    double wall_seconds;

    nlohmann::ordered_json to_json() const;
};

/// Runs every configured model and writes records_<model>.csv plus JSON sidecars
/// into out_dir, along with manifest_simulate.json.
RunManifest cmd_simulate(
    const protocol::ExperimentConfig &config, const std::filesystem::path &out_dir, size_t threads, std::ostream &out);

/// Thrown when record files cannot be analyzed together.
struct IncompatibleRecordsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Analyzes record files from a single simulate run; writes report.json,
/// correlations.csv and manifest_report.json into out_dir.
RunManifest cmd_report(
    const std::vector<std::filesystem::path> &record_paths, const std::filesystem::path &out_dir, std::ostream &out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char **argv, std::ostream &out, std::ostream &err);

}  // namespace cvbell::cli

#endif
