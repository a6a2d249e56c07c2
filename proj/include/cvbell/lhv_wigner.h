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

#ifndef _CVBELL_LHV_WIGNER_H
#define _CVBELL_LHV_WIGNER_H

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cvbell/gaussian_engine.h"
#include "cvbell/modes.h"
#include "cvbell/rng.h"

namespace cvbell::lhv {

/// One hidden variable: a c-number value of (X1, X2) for every mode.
///
/// The complex amplitude is alpha = (x1 + i x2) / 2, the c-number reading of
/// X1 = C^dagger + C and X2 = i (C^dagger - C).
class PhaseSpacePoint {
   public:
    PhaseSpacePoint(std::vector<ModeId> modes, std::vector<double> coordinates);

    const std::vector<ModeId> &modes() const {
        return modes_;
    }
    const std::vector<double> &coordinates() const {
        return coordinates_;
    }
    double x1(ModeId mode) const;
    double x2(ModeId mode) const;
    std::complex<double> amplitude(ModeId mode) const;

    /// c-number polarization rotation of the (h, v) pair; same convention as
    /// gaussian::polarization_rotation. Touches only those two modes.
    PhaseSpacePoint rotated(ModeId mode_h, ModeId mode_v, double theta) const;

   private:
    size_t offset(ModeId mode) const;

    std::vector<ModeId> modes_;
    std::vector<double> coordinates_;
};

/// Draws hidden variables from the Wigner function of a Gaussian state, which is
/// the normal distribution with the state's mean and covariance.
class PhaseSpaceSampler {
   public:
    explicit PhaseSpaceSampler(const gaussian::GaussianState &state);
    PhaseSpacePoint sample(SplitMix64 &rng) const;

   private:
    std::vector<ModeId> modes_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
};

PhaseSpacePoint sample_phase_space(const gaussian::GaussianState &state, SplitMix64 &rng);

/// Deterministic homodyne response x1 cos(phi) + x2 sin(phi) of one mode.
double response_quadrature(const PhaseSpacePoint &point, ModeId mode, double phase);

/// (x1_s^2 + x2_s^2 - x1_v^2 - x2_v^2) / 4. Can be negative.
double cnumber_count_rate(const PhaseSpacePoint &point, ModeId signal_mode, ModeId vacuum_mode);

/// |alpha_s|^2 - |alpha_v|^2. Equal to cnumber_count_rate up to rounding.
double cnumber_count_rate_from_amplitudes(const PhaseSpacePoint &point, ModeId signal_mode, ModeId vacuum_mode);

/// |alpha|^2 = (x1^2 + x2^2) / 4.
double cnumber_intensity(const PhaseSpacePoint &point, ModeId mode);

}  // namespace cvbell::lhv

#endif
