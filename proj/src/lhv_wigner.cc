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

#include "cvbell/lhv_wigner.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace cvbell::lhv {

PhaseSpacePoint::PhaseSpacePoint(std::vector<ModeId> modes, std::vector<double> coordinates)
    : modes_(std::move(modes)), coordinates_(std::move(coordinates)) {
    if (coordinates_.size() != 2 * modes_.size()) {
        throw std::invalid_argument("Phase-space point needs two coordinates per mode.");
    }
    for (double c : coordinates_) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("Phase-space coordinates must be finite.");
        }
    }
}

size_t PhaseSpacePoint::offset(ModeId mode) const {
    auto it = std::find(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end()) {
        throw std::invalid_argument("Mode " + std::string(mode_name(mode)) + " is not part of this phase-space point.");
    }
    return 2 * static_cast<size_t>(it - modes_.begin());
}

double PhaseSpacePoint::x1(ModeId mode) const {
    return coordinates_[offset(mode)];
}

double PhaseSpacePoint::x2(ModeId mode) const {
    return coordinates_[offset(mode) + 1];
}

std::complex<double> PhaseSpacePoint::amplitude(ModeId mode) const {
    size_t k = offset(mode);
    return {coordinates_[k] / 2, coordinates_[k + 1] / 2};
}

PhaseSpacePoint PhaseSpacePoint::rotated(ModeId mode_h, ModeId mode_v, double theta) const {
    size_t h = offset(mode_h);
    size_t v = offset(mode_v);
    double c = std::cos(theta);
    double s = std::sin(theta);
    std::vector<double> out = coordinates_;
    for (size_t q = 0; q < 2; q++) {
        out[h + q] = c * coordinates_[h + q] + s * coordinates_[v + q];
        out[v + q] = -s * coordinates_[h + q] + c * coordinates_[v + q];
    }
    return PhaseSpacePoint(modes_, std::move(out));
}

PhaseSpaceSampler::PhaseSpaceSampler(const gaussian::GaussianState &state)
    : modes_(state.modes()), mean_(state.mean()), factor_(gaussian::covariance_factor(state.cov())) {
}

PhaseSpacePoint PhaseSpaceSampler::sample(SplitMix64 &rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index k = 0; k < z.size(); k++) {
        z(k) = normal(rng);
    }
    Eigen::VectorXd x = mean_ + factor_ * z;
    return PhaseSpacePoint(modes_, std::vector<double>(x.data(), x.data() + x.size()));
}

PhaseSpacePoint sample_phase_space(const gaussian::GaussianState &state, SplitMix64 &rng) {
    return PhaseSpaceSampler(state).sample(rng);
}

double response_quadrature(const PhaseSpacePoint &point, ModeId mode, double phase) {
    return point.x1(mode) * std::cos(phase) + point.x2(mode) * std::sin(phase);
}

double cnumber_count_rate(const PhaseSpacePoint &point, ModeId signal_mode, ModeId vacuum_mode) {
    double s1 = point.x1(signal_mode);
    double s2 = point.x2(signal_mode);
    double v1 = point.x1(vacuum_mode);
    double v2 = point.x2(vacuum_mode);
    return (s1 * s1 + s2 * s2 - v1 * v1 - v2 * v2) / 4;
}

double cnumber_count_rate_from_amplitudes(const PhaseSpacePoint &point, ModeId signal_mode, ModeId vacuum_mode) {
    return std::norm(point.amplitude(signal_mode)) - std::norm(point.amplitude(vacuum_mode));
}

double cnumber_intensity(const PhaseSpacePoint &point, ModeId mode) {
    double a = point.x1(mode);
    double b = point.x2(mode);
    return (a * a + b * b) / 4;
}

}  // namespace cvbell::lhv
