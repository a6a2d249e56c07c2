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

#ifndef _CVBELL_PROTOCOL_H
#define _CVBELL_PROTOCOL_H

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cvbell/gaussian_engine.h"
#include "cvbell/modes.h"

namespace cvbell::protocol {

enum class Model { quantum, lhv };
enum class ModelSelection { quantum, lhv, both };

std::string_view model_name(Model model);
Model model_from_name(std::string_view name);
std::string_view model_selection_name(ModelSelection selection);
ModelSelection model_selection_from_name(std::string_view name);
std::vector<Model> selected_models(ModelSelection selection);

/// Invalid configuration value. field() is the config key at fault.
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(std::string field, const std::string &message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {
    }
    const std::string &field() const {
        return field_;
    }

   private:
    std::string field_;
};

inline constexpr uint64_t DEFAULT_SEED = 0x5EED;

struct ExperimentConfig {
    double squeezing = 0.5;
    std::vector<double> angles_a{0.0, std::numbers::pi / 4};
    std::vector<double> angles_b{std::numbers::pi / 8, 3 * std::numbers::pi / 8};
    uint64_t n_trials = 1'000'000;
    /// Per-station probability of an auxiliary vacuum-intensity measurement.
    double aux_probability = 0.1;
    /// Per-station probability of a blocked-beam homodyne calibration of the vacuum quadratures.
    double calibration_probability = 0.1;
    uint64_t seed = DEFAULT_SEED;
    ModelSelection model = ModelSelection::both;
    /// Fock truncation used by oracle cross-checks.
    size_t truncation = 12;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    const std::vector<double> &angles(Station station) const {
        return station == Station::A ? angles_a : angles_b;
    }
    bool operator==(const ExperimentConfig &) const = default;
};

enum class Output { parallel, perpendicular };

/// Homodyne of one polarization output (at analyzer angle theta) of the entangled beam.
/// quad 1 is X1 (phase 0), quad 2 is X2 (phase pi/2).
struct QuadratureSetting {
    double theta;
    Output output;
    int quad;
    double phase() const {
        return quad == 1 ? 0.0 : std::numbers::pi / 2;
    }
    bool operator==(const QuadratureSetting &) const = default;
};

/// Homodyne with the entangled beam blocked: the detector sees only the vacuum mode.
struct VacuumQuadratureSetting {
    int quad;
    double phase() const {
        return quad == 1 ? 0.0 : std::numbers::pi / 2;
    }
    bool operator==(const VacuumQuadratureSetting &) const = default;
};

/// Photon counting with both the beam and the local oscillator blocked.
struct AuxIntensitySetting {
    bool operator==(const AuxIntensitySetting &) const = default;
};

struct MeasurementSetting {
    Station station;
    std::variant<QuadratureSetting, VacuumQuadratureSetting, AuxIntensitySetting> variant;

    bool is_quadrature() const {
        return std::holds_alternative<QuadratureSetting>(variant);
    }
    bool is_vacuum_quadrature() const {
        return std::holds_alternative<VacuumQuadratureSetting>(variant);
    }
    bool is_aux() const {
        return std::holds_alternative<AuxIntensitySetting>(variant);
    }

    /// `station:variant:theta:output:quad`, e.g. `A:quad:0.78539816339744828:par:1`,
    /// `B:vac:-:-:2`, `A:aux:-:-:-`. Theta uses 17 significant digits.
    std::string encode() const;
    static MeasurementSetting decode(std::string_view text);

    bool operator==(const MeasurementSetting &) const = default;
};

/// All settings a station can be scheduled into, in a fixed order:
/// quadratures (theta-major, then output, then quad), vacuum quads 1 and 2, aux.
std::vector<MeasurementSetting> station_settings(const ExperimentConfig &config, Station station);
/// Position of `setting` in station_settings(); throws if not configured.
size_t setting_index(const ExperimentConfig &config, const MeasurementSetting &setting);

struct SettingPair {
    MeasurementSetting a;
    MeasurementSetting b;
};

/// Only present for hidden-variable records: the c-number individuals a real
/// experiment cannot access. Count rates exist only for quadrature settings.
struct LhvIndividuals {
    std::optional<double> count_rate_a;
    std::optional<double> count_rate_b;
    double intensity_va;
    double intensity_vb;
    bool operator==(const LhvIndividuals &) const = default;
};

struct TrialRecord {
    uint64_t trial_id;
    Model model;
    MeasurementSetting setting_a;
    MeasurementSetting setting_b;
    double outcome_a;
    double outcome_b;
    std::optional<LhvIndividuals> lhv;

    const MeasurementSetting &setting(Station station) const {
        return station == Station::A ? setting_a : setting_b;
    }
    double outcome(Station station) const {
        return station == Station::A ? outcome_a : outcome_b;
    }
    bool operator==(const TrialRecord &) const = default;
};

struct RecordSet {
    ExperimentConfig config;
    Model model;
    uint64_t master_seed;
    std::string stream_scheme;
    std::vector<TrialRecord> records;
};

/// Two parallel two-mode squeezers, (A_H, B_H) and (A_V, B_V), with squeezing r;
/// V_A and V_B in vacuum. Mode order A_H, A_V, B_H, B_V, V_A, V_B.
gaussian::GaussianState prepare_state(const ExperimentConfig &config);

/// Replaces the station's beam modes with fresh vacuum.
gaussian::GaussianState blocked_station_state(const gaussian::GaussianState &state, Station station);

/// Settings for one trial; a pure function of (config.seed, trial_id).
SettingPair schedule_trial(const ExperimentConfig &config, uint64_t trial_id);
std::vector<SettingPair> build_schedule(const ExperimentConfig &config);

/// Worker count: hardware concurrency, capped by CVBELL_THREADS when set.
size_t worker_threads_from_env();

/// Records are identical for any thread count.
RecordSet run_experiment(const ExperimentConfig &config, Model model, size_t threads = 1);
/// One RecordSet per model in config.model.
std::vector<RecordSet> run_experiments(const ExperimentConfig &config, size_t threads = 1);

}  // namespace cvbell::protocol

#endif
