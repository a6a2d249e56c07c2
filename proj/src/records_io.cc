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

#include "cvbell/records_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cvbell/number_format.h"
#include "cvbell/rng.h"

namespace cvbell::protocol {

namespace {

constexpr std::string_view SIDECAR_FORMAT = "cvbell-records";
constexpr int SIDECAR_VERSION = 1;

double json_number(const nlohmann::json &value, const std::string &key) {
    if (!value.is_number()) {
        throw ConfigError(key, "expected a number");
    }
    return value.get<double>();
}

uint64_t json_unsigned(const nlohmann::json &value, const std::string &key) {
    if (!value.is_number_unsigned()) {
        throw ConfigError(key, "expected a nonnegative integer");
    }
    return value.get<uint64_t>();
}

std::vector<double> json_angles(const nlohmann::json &value, const std::string &key) {
    if (!value.is_array()) {
        throw ConfigError(key, "expected an array of angles in radians");
    }
    std::vector<double> out;
    for (const auto &v : value) {
        out.push_back(json_number(v, key));
    }
    return out;
}

}  // namespace

nlohmann::ordered_json config_to_json(const ExperimentConfig &config) {
    nlohmann::ordered_json j;
    j["squeezing"] = config.squeezing;
    j["angles_a"] = config.angles_a;
    j["angles_b"] = config.angles_b;
    j["trials"] = config.n_trials;
    j["aux_probability"] = config.aux_probability;
    j["calibration_probability"] = config.calibration_probability;
    j["seed"] = config.seed;
    j["model"] = std::string(model_selection_name(config.model));
    j["truncation"] = config.truncation;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json &json) {
    if (!json.is_object()) {
        throw ConfigError("<root>", "configuration must be a JSON object");
    }
    ExperimentConfig config;
    for (const auto &[key, value] : json.items()) {
        if (key == "squeezing") {
            config.squeezing = json_number(value, key);
        } else if (key == "angles_a") {
            config.angles_a = json_angles(value, key);
        } else if (key == "angles_b") {
            config.angles_b = json_angles(value, key);
        } else if (key == "trials") {
            config.n_trials = json_unsigned(value, key);
        } else if (key == "aux_probability") {
            config.aux_probability = json_number(value, key);
        } else if (key == "calibration_probability") {
            config.calibration_probability = json_number(value, key);
        } else if (key == "seed") {
            config.seed = json_unsigned(value, key);
        } else if (key == "model") {
            if (!value.is_string()) {
                throw ConfigError(key, "expected quantum, lhv or both");
            }
            config.model = model_selection_from_name(value.get<std::string>());
        } else if (key == "truncation") {
            config.truncation = json_unsigned(value, key);
        } else {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    config.validate();
    return config;
}

void write_records_csv(const RecordSet &records, std::ostream &out) {
    constexpr size_t FLUSH_AT = size_t{1} << 20;
    std::string buffer;
    buffer.reserve(FLUSH_AT + 1024);
    buffer += RECORDS_CSV_HEADER;
    buffer += '\n';
    auto optional_field = [&](const std::optional<double> &v) {
        if (v) {
            buffer += format_double(*v);
        }
    };
    for (const auto &r : records.records) {
        buffer += std::to_string(r.trial_id);
        buffer += ',';
        buffer += model_name(r.model);
        buffer += ',';
        buffer += r.setting_a.encode();
        buffer += ',';
        buffer += r.setting_b.encode();
        buffer += ',';
        buffer += format_double(r.outcome_a);
        buffer += ',';
        buffer += format_double(r.outcome_b);
        buffer += ',';
        if (r.lhv) {
            optional_field(r.lhv->count_rate_a);
            buffer += ',';
            optional_field(r.lhv->count_rate_b);
            buffer += ',';
            buffer += format_double(r.lhv->intensity_va);
            buffer += ',';
            buffer += format_double(r.lhv->intensity_vb);
        } else {
            buffer += ",,,";
        }
        buffer += '\n';
        if (buffer.size() >= FLUSH_AT) {
            out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
            buffer.clear();
        }
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

nlohmann::ordered_json records_sidecar(const RecordSet &records) {
    nlohmann::ordered_json j;
    j["format"] = SIDECAR_FORMAT;
    j["version"] = SIDECAR_VERSION;
    j["model"] = std::string(model_name(records.model));
    j["n_trials"] = records.records.size();
    j["config"] = config_to_json(records.config);
    j["rng"] = {{"master_seed", records.master_seed}, {"stream_scheme", records.stream_scheme}};
    return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path &csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void save_record_set(const RecordSet &records, const std::filesystem::path &csv_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("Cannot open " + csv_path.string() + " for writing.");
        }
        write_records_csv(records, out);
        if (!out) {
            throw std::runtime_error("Failed writing " + csv_path.string() + ".");
        }
    }
    auto side = sidecar_path(csv_path);
    std::ofstream out(side, std::ios::binary);
    if (!out) {
        throw std::runtime_error("Cannot open " + side.string() + " for writing.");
    }
    out << records_sidecar(records).dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("Failed writing " + side.string() + ".");
    }
}

namespace {

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("Cannot open " + path.string() + ".");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RowContext {
    const std::filesystem::path &path;
    size_t line;
    [[noreturn]] void fail(const std::string &what) const {
        throw SchemaError(path.string() + ":" + std::to_string(line) + ": " + what);
    }
};

double finite_field(std::string_view text, const RowContext &ctx, const char *column) {
    double v = 0;
    try {
        v = parse_double(text);
    } catch (const std::invalid_argument &) {
        ctx.fail(std::string("column ") + column + " is not a number");
    }
    if (!std::isfinite(v)) {
        ctx.fail(std::string("column ") + column + " is not finite");
    }
    return v;
}

RecordSet read_sidecar(const std::filesystem::path &side_path) {
    RecordSet out;
    try {
        auto side = nlohmann::json::parse(read_file(side_path));
        if (side.at("format") != SIDECAR_FORMAT || side.at("version") != SIDECAR_VERSION) {
            throw SchemaError(side_path.string() + ": not a cvbell records sidecar (format/version mismatch).");
        }
        out.model = model_from_name(side.at("model").get<std::string>());
        out.config = config_from_json(side.at("config"));
        out.master_seed = side.at("rng").at("master_seed").get<uint64_t>();
        out.stream_scheme = side.at("rng").at("stream_scheme").get<std::string>();
        if (side.at("n_trials").get<uint64_t>() != out.config.n_trials) {
            throw SchemaError(side_path.string() + ": n_trials disagrees with config.trials.");
        }
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(side_path.string() + ": " + e.what());
    } catch (const std::invalid_argument &e) {
        throw SchemaError(side_path.string() + ": " + e.what());
    }
    if (out.master_seed != out.config.seed) {
        throw SchemaError(side_path.string() + ": rng.master_seed disagrees with config.seed.");
    }
    if (out.stream_scheme != STREAM_SCHEME) {
        throw SchemaError(side_path.string() + ": unsupported stream scheme '" + out.stream_scheme + "'.");
    }
    return out;
}

}  // namespace

RecordSet load_record_set(const std::filesystem::path &csv_path) {
    RecordSet out = read_sidecar(sidecar_path(csv_path));

    std::string text = read_file(csv_path);
    std::string_view rest(text);
    size_t line_no = 0;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (rest.empty()) return std::nullopt;
        size_t end = rest.find('\n');
        std::string_view line = rest.substr(0, end);
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
        line_no++;
        return line;
    };
    auto header = next_line();
    if (!header || *header != RECORDS_CSV_HEADER) {
        throw SchemaError(csv_path.string() + ": unexpected header.");
    }
    std::string_view model_tag = model_name(out.model);
    out.records.reserve(out.config.n_trials);
    std::array<std::string_view, 10> f;
    while (auto line = next_line()) {
        RowContext ctx{csv_path, line_no};
        size_t n = 0;
        size_t start = 0;
        while (true) {
            size_t comma = line->find(',', start);
            if (n == f.size()) ctx.fail("too many columns");
            f[n++] = line->substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (n != f.size()) ctx.fail("expected 10 columns");

        TrialRecord r{};
        try {
            r.trial_id = parse_uint(f[0]);
        } catch (const std::invalid_argument &) {
            ctx.fail("bad trial_id");
        }
        if (r.trial_id != out.records.size()) ctx.fail("trial ids must be consecutive from 0");
        if (f[1] != model_tag) ctx.fail("model column disagrees with sidecar");
        r.model = out.model;
        try {
            r.setting_a = MeasurementSetting::decode(f[2]);
            r.setting_b = MeasurementSetting::decode(f[3]);
            if (r.setting_a.station != Station::A || r.setting_b.station != Station::B) {
                ctx.fail("setting columns carry the wrong station");
            }
            setting_index(out.config, r.setting_a);
            setting_index(out.config, r.setting_b);
        } catch (const std::invalid_argument &e) {
            ctx.fail(e.what());
        }
        r.outcome_a = finite_field(f[4], ctx, "outcome_a");
        r.outcome_b = finite_field(f[5], ctx, "outcome_b");
        if (out.model == Model::quantum) {
            if (!f[6].empty() || !f[7].empty() || !f[8].empty() || !f[9].empty()) {
                ctx.fail("quantum records must not carry hidden-variable individuals");
            }
        } else {
            LhvIndividuals ind{};
            std::array<std::optional<double> *, 2> rates{&ind.count_rate_a, &ind.count_rate_b};
            std::array<const MeasurementSetting *, 2> settings{&r.setting_a, &r.setting_b};
            for (size_t k = 0; k < 2; k++) {
                bool want = settings[k]->is_quadrature();
                if (want == f[6 + k].empty()) {
                    ctx.fail("count rate must be present iff the station measured a quadrature");
                }
                if (want) *rates[k] = finite_field(f[6 + k], ctx, k == 0 ? "count_rate_a" : "count_rate_b");
            }
            ind.intensity_va = finite_field(f[8], ctx, "intensity_va");
            ind.intensity_vb = finite_field(f[9], ctx, "intensity_vb");
            r.lhv = ind;
        }
        out.records.push_back(std::move(r));
    }
    if (out.records.size() != out.config.n_trials) {
        throw SchemaError(csv_path.string() + ": record count does not match the configured number of trials.");
    }
    return out;
}

}  // namespace cvbell::protocol
