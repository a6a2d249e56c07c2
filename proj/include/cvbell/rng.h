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

#ifndef _CVBELL_RNG_H
#define _CVBELL_RNG_H

#include <cstdint>
#include <limits>
#include <string_view>

namespace cvbell {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Cheap to construct, so the experiment runner can open a fresh stream for
/// every (trial, purpose) pair instead of sharing one generator across trials.
class SplitMix64 {
   public:
    using result_type = uint64_t;

    explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    static constexpr uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

   private:
    uint64_t state_;
};

/// What a per-trial stream is used for. Values are part of the stream scheme
/// and must never be renumbered.
enum class StreamPurpose : uint64_t {
    ScheduleA = 1,
    ScheduleB = 2,
    QuantumQuadratures = 3,
    QuantumCountA = 4,
    QuantumCountB = 5,
    HiddenVariable = 6,
};

inline constexpr std::string_view STREAM_SCHEME = "splitmix64:seed/trial/purpose:v1";

/// Counter-based stream derivation: the stream depends only on its key, so
/// trials can be evaluated in any order or on any thread.
constexpr SplitMix64 trial_stream(uint64_t master_seed, uint64_t trial_id, StreamPurpose purpose) {
    uint64_t key = SplitMix64::mix(master_seed ^ 0x6A09E667F3BCC909ULL);
    key = SplitMix64::mix(key ^ (trial_id + 0x9E3779B97F4A7C15ULL));
    key = SplitMix64::mix(key ^ (static_cast<uint64_t>(purpose) * 0xD1B54A32D192ED03ULL));
    return SplitMix64(key);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(SplitMix64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cvbell

#endif
