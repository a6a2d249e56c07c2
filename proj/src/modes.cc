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

#include "cvbell/modes.h"

#include <stdexcept>
#include <string>

namespace cvbell {

std::string_view mode_name(ModeId mode) {
    switch (mode) {
        case ModeId::A_H:
            return "A_H";
        case ModeId::A_V:
            return "A_V";
        case ModeId::B_H:
            return "B_H";
        case ModeId::B_V:
            return "B_V";
        case ModeId::V_A:
            return "V_A";
        case ModeId::V_B:
            return "V_B";
    }
    throw std::invalid_argument("Unknown mode id.");
}

ModeId mode_from_name(std::string_view name) {
    for (ModeId m : ALL_MODES) {
        if (mode_name(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("Unknown mode name '" + std::string(name) + "'.");
}

char station_letter(Station station) {
    return station == Station::A ? 'A' : 'B';
}

}  // namespace cvbell
