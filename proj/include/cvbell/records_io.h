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

#ifndef _CVBELL_RECORDS_IO_H
#define _CVBELL_RECORDS_IO_H

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "json.hpp"

#include "cvbell/protocol.h"

namespace cvbell::protocol {

/// A records file or sidecar that does not match the expected layout.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view RECORDS_CSV_HEADER =
    "trial_id,model,setting_a,setting_b,outcome_a,outcome_b,count_rate_a,count_rate_b,intensity_va,intensity_vb";

nlohmann::ordered_json config_to_json(const ExperimentConfig &config);

/// Starts from defaults and overlays the given keys. Unknown keys and wrongly
/// typed values throw ConfigError naming the key. The result is validated.
ExperimentConfig config_from_json(const nlohmann::json &json);

/// One row per trial, floats with 17 significant digits. LHV-only columns are
/// left empty for quantum records.
void write_records_csv(const RecordSet &records, std::ostream &out);

nlohmann::ordered_json records_sidecar(const RecordSet &records);

/// `records_quantum.csv` -> `records_quantum.json`.
std::filesystem::path sidecar_path(const std::filesystem::path &csv_path);

/// Writes the CSV and its JSON sidecar.
void save_record_set(const RecordSet &records, const std::filesystem::path &csv_path);

/// Reads a CSV and its sidecar, validating both. Throws SchemaError.
RecordSet load_record_set(const std::filesystem::path &csv_path);

}  // namespace cvbell::protocol

#endif
