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

#include "cvbell/protocol.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>
#include <thread>

#include "cvbell/lhv_wigner.h"
#include "cvbell/number_format.h"
#include "cvbell/rng.h"

namespace cvbell::protocol {

std::string_view model_name(Model model) {
    return model == Model::quantum ? "quantum" : "lhv";
}

Model model_from_name(std::string_view name) {
    if (name == "quantum") return Model::quantum;
    if (name == "lhv") return Model::lhv;
    throw std::invalid_argument("Unknown model '" + std::string(name) + "'.");
}

std::string_view model_selection_name(ModelSelection selection) {
    switch (selection) {
        case ModelSelection::quantum:
            return "quantum";
        case ModelSelection::lhv:
            return "lhv";
        case ModelSelection::both:
            return "both";
    }
    return "both";
}

ModelSelection model_selection_from_name(std::string_view name) {
    if (name == "quantum") return ModelSelection::quantum;
    if (name == "lhv") return ModelSelection::lhv;
    if (name == "both") return ModelSelection::both;
    throw ConfigError("model", "expected quantum, lhv or both, got '" + std::string(name) + "'");
}

std::vector<Model> selected_models(ModelSelection selection) {
    switch (selection) {
        case ModelSelection::quantum:
            return {Model::quantum};
        case ModelSelection::lhv:
            return {Model::lhv};
        case ModelSelection::both:
            break;
    }
    return {Model::quantum, Model::lhv};
}

namespace {

void validate_angles(const std::vector<double> &angles, const std::string &field) {
    if (angles.empty()) {
        throw ConfigError(field, "angle list must not be empty");
    }
    std::set<double> seen;
    for (double a : angles) {
        if (!std::isfinite(a)) {
            throw ConfigError(field, "angles must be finite");
        }
        if (!seen.insert(a).second) {
            throw ConfigError(field, "duplicate angle " + format_double(a));
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!std::isfinite(squeezing) || squeezing < 0) {
        throw ConfigError("squeezing", "must be finite and >= 0, got " + format_double(squeezing));
    }
    validate_angles(angles_a, "angles_a");
    validate_angles(angles_b, "angles_b");
    if (n_trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    if (!(aux_probability >= 0 && aux_probability < 1)) {
        throw ConfigError("aux_probability", "must lie in [0, 1), got " + format_double(aux_probability));
    }
    if (!(calibration_probability >= 0 && calibration_probability < 1)) {
        throw ConfigError(
            "calibration_probability", "must lie in [0, 1), got " + format_double(calibration_probability));
    }
    if (!(aux_probability + calibration_probability < 1)) {
        throw ConfigError("calibration_probability", "aux_probability + calibration_probability must be < 1");
    }
    if (truncation < 2 || truncation > 16) {
        throw ConfigError("truncation", "must lie in [2, 16], got " + std::to_string(truncation));
    }
}

namespace {

std::string_view output_code(Output output) {
    return output == Output::parallel ? "par" : "perp";
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    while (true) {
        size_t end = text.find(sep, start);
        parts.push_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) {
            return parts;
        }
        start = end + 1;
    }
}

int parse_quad(std::string_view text) {
    if (text == "1") return 1;
    if (text == "2") return 2;
    throw std::invalid_argument("Quadrature index must be 1 or 2, got '" + std::string(text) + "'.");
}

}  // namespace

std::string MeasurementSetting::encode() const {
    std::string out(1, station_letter(station));
    if (const auto *q = std::get_if<QuadratureSetting>(&variant)) {
        out += ":quad:" + format_double(q->theta) + ":" + std::string(output_code(q->output)) + ":" +
               std::to_string(q->quad);
    } else if (const auto *v = std::get_if<VacuumQuadratureSetting>(&variant)) {
        out += ":vac:-:-:" + std::to_string(v->quad);
    } else {
        out += ":aux:-:-:-";
    }
    return out;
}

MeasurementSetting MeasurementSetting::decode(std::string_view text) {
    auto parts = split(text, ':');
    if (parts.size() != 5) {
        throw std::invalid_argument("Malformed setting '" + std::string(text) + "': expected 5 ':'-separated fields.");
    }
    MeasurementSetting s{Station::A, AuxIntensitySetting{}};
    if (parts[0] == "A") {
        s.station = Station::A;
    } else if (parts[0] == "B") {
        s.station = Station::B;
    } else {
        throw std::invalid_argument("Malformed setting '" + std::string(text) + "': unknown station.");
    }
    if (parts[1] == "quad") {
        Output output;
        if (parts[3] == "par") {
            output = Output::parallel;
        } else if (parts[3] == "perp") {
            output = Output::perpendicular;
        } else {
            throw std::invalid_argument("Malformed setting '" + std::string(text) + "': unknown output.");
        }
        s.variant = QuadratureSetting{parse_double(parts[2]), output, parse_quad(parts[4])};
    } else if (parts[1] == "vac" && parts[2] == "-" && parts[3] == "-") {
        s.variant = VacuumQuadratureSetting{parse_quad(parts[4])};
    } else if (parts[1] == "aux" && parts[2] == "-" && parts[3] == "-" && parts[4] == "-") {
        s.variant = AuxIntensitySetting{};
    } else {
        throw std::invalid_argument("Malformed setting '" + std::string(text) + "'.");
    }
    return s;
}

std::vector<MeasurementSetting> station_settings(const ExperimentConfig &config, Station station) {
    std::vector<MeasurementSetting> out;
    for (double theta : config.angles(station)) {
        for (Output output : {Output::parallel, Output::perpendicular}) {
            for (int quad : {1, 2}) {
                out.push_back({station, QuadratureSetting{theta, output, quad}});
            }
        }
    }
    out.push_back({station, VacuumQuadratureSetting{1}});
    out.push_back({station, VacuumQuadratureSetting{2}});
    out.push_back({station, AuxIntensitySetting{}});
    return out;
}

size_t setting_index(const ExperimentConfig &config, const MeasurementSetting &setting) {
    const auto &angles = config.angles(setting.station);
    size_t quad_count = 4 * angles.size();
    if (const auto *q = std::get_if<QuadratureSetting>(&setting.variant)) {
        auto it = std::find(angles.begin(), angles.end(), q->theta);
        if (it == angles.end()) {
            throw std::invalid_argument("Setting " + setting.encode() + " uses an angle that is not configured.");
        }
        size_t t = static_cast<size_t>(it - angles.begin());
        return (t * 2 + (q->output == Output::parallel ? 0 : 1)) * 2 + static_cast<size_t>(q->quad - 1);
    }
    if (const auto *v = std::get_if<VacuumQuadratureSetting>(&setting.variant)) {
        return quad_count + static_cast<size_t>(v->quad - 1);
    }
    return quad_count + 2;
}

gaussian::GaussianState prepare_state(const ExperimentConfig &config) {
    config.validate();
    auto state = gaussian::vacuum_state({ALL_MODES.begin(), ALL_MODES.end()});
    state = gaussian::two_mode_squeeze(state, ModeId::A_H, ModeId::B_H, config.squeezing);
    state = gaussian::two_mode_squeeze(state, ModeId::A_V, ModeId::B_V, config.squeezing);
    return state;
}

gaussian::GaussianState blocked_station_state(const gaussian::GaussianState &state, Station station) {
    auto modes = station_modes(station);
    std::array<ModeId, 2> beam{modes.horizontal, modes.vertical};
    return gaussian::reset_to_vacuum(state, beam);
}

namespace {

MeasurementSetting schedule_station(const ExperimentConfig &config, Station station, uint64_t trial_id) {
    auto rng = trial_stream(
        config.seed, trial_id, station == Station::A ? StreamPurpose::ScheduleA : StreamPurpose::ScheduleB);
    double u = uniform_unit(rng);
    if (u < config.aux_probability) {
        return {station, AuxIntensitySetting{}};
    }
    if (u < config.aux_probability + config.calibration_probability) {
        return {station, VacuumQuadratureSetting{uniform_unit(rng) < 0.5 ? 1 : 2}};
    }
    const auto &angles = config.angles(station);
    size_t choices = 4 * angles.size();
    size_t pick = std::min(choices - 1, static_cast<size_t>(uniform_unit(rng) * static_cast<double>(choices)));
    Output output = (pick / 2) % 2 == 0 ? Output::parallel : Output::perpendicular;
    return {station, QuadratureSetting{angles[pick / 4], output, static_cast<int>(pick % 2) + 1}};
}

}  // namespace

SettingPair schedule_trial(const ExperimentConfig &config, uint64_t trial_id) {
    return {schedule_station(config, Station::A, trial_id), schedule_station(config, Station::B, trial_id)};
}

std::vector<SettingPair> build_schedule(const ExperimentConfig &config) {
    config.validate();
    std::vector<SettingPair> out;
    out.reserve(config.n_trials);
    for (uint64_t t = 0; t < config.n_trials; t++) {
        out.push_back(schedule_trial(config, t));
    }
    return out;
}

size_t worker_threads_from_env() {
    size_t threads = std::max<size_t>(1, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("CVBELL_THREADS"); env != nullptr && *env != '\0') {
        uint64_t cap;
        try {
            cap = parse_uint(env);
        } catch (const std::invalid_argument &) {
            throw ConfigError("CVBELL_THREADS", "must be a positive integer, got '" + std::string(env) + "'");
        }
        if (cap == 0) {
            throw ConfigError("CVBELL_THREADS", "must be a positive integer");
        }
        threads = std::min<size_t>(threads, cap);
    }
    return threads;
}

namespace {

/// Everything needed to sample one (setting_A, setting_B) combination under the quantum model.
struct QuantumPlan {
    std::optional<gaussian::QuadratureSampler> sampler;
    // Position of each station's quadrature in the sampler output, if any.
    std::array<std::optional<size_t>, 2> slot;
    std::array<std::optional<gaussian::PhotonCounter>, 2> counter;
};

ModeId output_mode(Station station, Output output) {
    auto modes = station_modes(station);
    return output == Output::parallel ? modes.horizontal : modes.vertical;
}

QuantumPlan make_quantum_plan(const gaussian::GaussianState &prepared, const SettingPair &pair) {
    auto state = prepared;
    std::array<const MeasurementSetting *, 2> settings{&pair.a, &pair.b};
    for (const auto *s : settings) {
        if (const auto *q = std::get_if<QuadratureSetting>(&s->variant)) {
            auto modes = station_modes(s->station);
            state = gaussian::polarization_rotation(state, modes.horizontal, modes.vertical, q->theta);
        } else {
            state = blocked_station_state(state, s->station);
        }
    }
    QuantumPlan plan;
    std::vector<gaussian::QuadratureRequest> requests;
    for (const auto *s : settings) {
        size_t k = static_cast<size_t>(s->station);
        if (const auto *q = std::get_if<QuadratureSetting>(&s->variant)) {
            plan.slot[k] = requests.size();
            requests.push_back(gaussian::make_request(output_mode(s->station, q->output), q->phase()));
        } else if (const auto *v = std::get_if<VacuumQuadratureSetting>(&s->variant)) {
            plan.slot[k] = requests.size();
            requests.push_back(gaussian::make_request(station_modes(s->station).vacuum, v->phase()));
        } else {
            plan.counter[k].emplace(state, station_modes(s->station).vacuum);
        }
    }
    if (!requests.empty()) {
        plan.sampler.emplace(state, requests);
    }
    return plan;
}

class TrialEvaluator {
   public:
    TrialEvaluator(const ExperimentConfig &config, Model model) : config_(config), model_(model) {
        prepared_ = std::make_unique<gaussian::GaussianState>(prepare_state(config));
        width_ = station_settings(config, Station::B).size();
        if (model == Model::quantum) {
            for (const auto &a : station_settings(config, Station::A)) {
                for (const auto &b : station_settings(config, Station::B)) {
                    plans_.push_back(make_quantum_plan(*prepared_, {a, b}));
                }
            }
        } else {
            hidden_ = std::make_unique<lhv::PhaseSpaceSampler>(*prepared_);
        }
    }

    TrialRecord evaluate(uint64_t trial_id) const {
        auto pair = schedule_trial(config_, trial_id);
        TrialRecord rec{trial_id, model_, pair.a, pair.b, 0.0, 0.0, std::nullopt};
        if (model_ == Model::quantum) {
            evaluate_quantum(rec);
        } else {
            evaluate_lhv(rec);
        }
        return rec;
    }

   private:
    void evaluate_quantum(TrialRecord &rec) const {
        const auto &plan = plans_[setting_index(config_, rec.setting_a) * width_ + setting_index(config_, rec.setting_b)];
        std::array<double, 2> quadratures{0, 0};
        if (plan.sampler) {
            auto rng = trial_stream(config_.seed, rec.trial_id, StreamPurpose::QuantumQuadratures);
            plan.sampler->sample_into(rng, std::span<double>(quadratures.data(), plan.sampler->size()));
        }
        std::array<double *, 2> outcome{&rec.outcome_a, &rec.outcome_b};
        for (size_t k = 0; k < 2; k++) {
            if (plan.slot[k]) {
                *outcome[k] = quadratures[*plan.slot[k]];
            } else {
                auto rng = trial_stream(
                    config_.seed, rec.trial_id, k == 0 ? StreamPurpose::QuantumCountA : StreamPurpose::QuantumCountB);
                *outcome[k] = static_cast<double>(plan.counter[k]->sample(rng));
            }
        }
    }

    void evaluate_lhv(TrialRecord &rec) const {
        auto rng = trial_stream(config_.seed, rec.trial_id, StreamPurpose::HiddenVariable);
        auto lambda = hidden_->sample(rng);
        LhvIndividuals individuals{
            std::nullopt, std::nullopt, lhv::cnumber_intensity(lambda, ModeId::V_A),
            lhv::cnumber_intensity(lambda, ModeId::V_B)};
        for (Station station : {Station::A, Station::B}) {
            const auto &setting = rec.setting(station);
            auto modes = station_modes(station);
            double outcome;
            std::optional<double> rate;
            if (const auto *q = std::get_if<QuadratureSetting>(&setting.variant)) {
                // Local response: only this station's coordinates and setting enter.
                auto local = lambda.rotated(modes.horizontal, modes.vertical, q->theta);
                ModeId out = output_mode(station, q->output);
                outcome = lhv::response_quadrature(local, out, q->phase());
                rate = lhv::cnumber_count_rate(local, out, modes.vacuum);
            } else if (const auto *v = std::get_if<VacuumQuadratureSetting>(&setting.variant)) {
                outcome = lhv::response_quadrature(lambda, modes.vacuum, v->phase());
            } else {
                outcome = lhv::cnumber_intensity(lambda, modes.vacuum);
            }
            if (station == Station::A) {
                rec.outcome_a = outcome;
                individuals.count_rate_a = rate;
            } else {
                rec.outcome_b = outcome;
                individuals.count_rate_b = rate;
            }
        }
        rec.lhv = individuals;
    }

    const ExperimentConfig &config_;
    Model model_;
    std::unique_ptr<gaussian::GaussianState> prepared_;
    size_t width_ = 0;
    std::vector<QuantumPlan> plans_;
    std::unique_ptr<lhv::PhaseSpaceSampler> hidden_;
};

}  // namespace

RecordSet run_experiment(const ExperimentConfig &config, Model model, size_t threads) {
    config.validate();
    TrialEvaluator evaluator(config, model);
    RecordSet out{config, model, config.seed, std::string(STREAM_SCHEME), {}};
    out.records.resize(config.n_trials);

    threads = std::clamp<size_t>(threads, 1, static_cast<size_t>(std::max<uint64_t>(1, config.n_trials)));
    uint64_t chunk = (config.n_trials + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](size_t worker) {
        try {
            uint64_t begin = worker * chunk;
            uint64_t end = std::min<uint64_t>(config.n_trials, begin + chunk);
            for (uint64_t t = begin; t < end; t++) {
                out.records[t] = evaluator.evaluate(t);
            }
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < threads; w++) {
            pool.emplace_back(work, w);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::vector<RecordSet> run_experiments(const ExperimentConfig &config, size_t threads) {
    std::vector<RecordSet> out;
    for (Model m : selected_models(config.model)) {
        out.push_back(run_experiment(config, m, threads));
    }
    return out;
}

}  // namespace cvbell::protocol
