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

#ifndef _CVBELL_MODES_H
#define _CVBELL_MODES_H

#include <array>
#include <cstdint>
#include <string_view>

namespace cvbell {

/// Optical modes of the two-station experiment.
///
/// A_H, A_V (B_H, B_V) are the horizontal and vertical polarization modes of
/// the entangled beam arriving at station A (B). V_A and V_B are the vacuum
/// modes that enter each station's detector while its beam is blocked.
enum class ModeId : uint8_t {
    A_H = 0,
    A_V = 1,
    B_H = 2,
    B_V = 3,
    V_A = 4,
    V_B = 5,
};

inline constexpr std::array<ModeId, 6> ALL_MODES{
    ModeId::A_H, ModeId::A_V, ModeId::B_H, ModeId::B_V, ModeId::V_A, ModeId::V_B};

std::string_view mode_name(ModeId mode);
ModeId mode_from_name(std::string_view name);

inline constexpr bool is_vacuum_role(ModeId mode) {
    return mode == ModeId::V_A || mode == ModeId::V_B;
}

enum class Station : uint8_t { A = 0, B = 1 };

char station_letter(Station station);

/// The three modes wired into one station's detector.
struct StationModes {
    ModeId horizontal;
    ModeId vertical;
    ModeId vacuum;
};

constexpr StationModes station_modes(Station station) {
    if (station == Station::A) {
        return {ModeId::A_H, ModeId::A_V, ModeId::V_A};
    }
    return {ModeId::B_H, ModeId::B_V, ModeId::V_B};
}

}  // namespace cvbell

#endif
