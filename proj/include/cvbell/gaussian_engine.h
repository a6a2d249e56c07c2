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

#ifndef _CVBELL_GAUSSIAN_ENGINE_H
#define _CVBELL_GAUSSIAN_ENGINE_H

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "cvbell/modes.h"
#include "cvbell/rng.h"

namespace cvbell::gaussian {

/// Zero-or-nonzero-mean Gaussian state over quadrature phase space.
///
/// Phase-space vector ordering is (x1, x2) per mode in mode_list order. The
/// covariance is the symmetrized second moment, in units where the vacuum has
/// cov = identity (<X1^2> = 1 for X1 = C^dagger + C). In these units [X1, X2] = 2i,
/// and physical states satisfy cov + i*Omega >= 0 with Omega the block-diagonal
/// [[0, 1], [-1, 0]] form.
class GaussianState {
   public:
    /// Throws if cov is not symmetric (1e-12) or violates cov + i*Omega >= 0 (1e-10).
    GaussianState(std::vector<ModeId> modes, Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const std::vector<ModeId> &modes() const {
        return modes_;
    }
    const Eigen::VectorXd &mean() const {
        return mean_;
    }
    const Eigen::MatrixXd &cov() const {
        return cov_;
    }
    size_t mode_count() const {
        return modes_.size();
    }
    bool contains(ModeId mode) const;
    /// Index of the mode's x1 entry in the phase-space vector (x2 follows it).
    Eigen::Index offset(ModeId mode) const;

   private:
    std::vector<ModeId> modes_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

Eigen::MatrixXd symplectic_form(size_t mode_count);

/// Smallest eigenvalue of cov + i*Omega. Nonnegative for physical states.
double physicality_margin(const Eigen::MatrixXd &cov);

GaussianState vacuum_state(std::vector<ModeId> modes);

/// Applies the phase-space map R -> S R to mean and covariance.
GaussianState apply_symplectic(const GaussianState &state, const Eigen::MatrixXd &transform);

/// Symplectic matrix of the two-mode squeezer on (i, j):
/// x_i -> cosh r x_i + sinh r x_j, x2_i -> cosh r x2_i - sinh r x2_j, symmetrically for j.
/// Resulting convention: <X1_i X1_j> = sinh 2r, <X2_i X2_j> = -sinh 2r.
Eigen::MatrixXd two_mode_squeeze_matrix(const GaussianState &state, ModeId mode_i, ModeId mode_j, double r);
GaussianState two_mode_squeeze(const GaussianState &state, ModeId mode_i, ModeId mode_j, double r);

/// Passive polarization rotation: afterwards the h slot carries
/// cos(theta) a_h + sin(theta) a_v and the v slot carries -sin(theta) a_h + cos(theta) a_v.
Eigen::MatrixXd polarization_rotation_matrix(const GaussianState &state, ModeId mode_h, ModeId mode_v, double theta);
GaussianState polarization_rotation(const GaussianState &state, ModeId mode_h, ModeId mode_v, double theta);

/// Replaces the listed modes by fresh vacuum: their covariance block becomes
/// the identity and every correlation to other modes is removed.
GaussianState reset_to_vacuum(const GaussianState &state, std::span<const ModeId> modes);

/// Factor L with L L^T = cov; tolerates positive semidefinite input.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd &cov);

/// Homodyne request for X_phi = X1 cos(phi) + X2 sin(phi).
struct QuadratureRequest {
    ModeId mode;
    double phase;
};

/// Wraps phase into [0, 2 pi).
QuadratureRequest make_request(ModeId mode, double phase);

/// Row vector f with X_phi = f . R over the phase-space vector R.
Eigen::RowVectorXd quadrature_functional(const GaussianState &state, const QuadratureRequest &request);

/// Precomputed sampler for the joint distribution of commuting quadratures.
///
/// At most one request per mode is accepted: different quadratures of the same
/// mode do not commute and cannot be read out in the same shot.
class QuadratureSampler {
   public:
    QuadratureSampler(const GaussianState &state, std::span<const QuadratureRequest> requests);

    size_t size() const {
        return static_cast<size_t>(mean_.size());
    }
    const Eigen::VectorXd &mean() const {
        return mean_;
    }
    const Eigen::MatrixXd &cov() const {
        return cov_;
    }
    void sample_into(SplitMix64 &rng, std::span<double> out) const;
    std::vector<double> sample(SplitMix64 &rng) const;

   private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd factor_;
};

std::vector<double> joint_quadrature_sample(
    const GaussianState &state, std::span<const QuadratureRequest> requests, SplitMix64 &rng);

/// Symmetrically ordered moment <f_1 ... f_k> of up to four quadratures, by
/// Isserlis' theorem. This is the Wigner moment, which equals the quantum
/// expectation whenever the factors commute (e.g. X_A^2 X_B^2). Zero-mean states only.
double analytic_moment(const GaussianState &state, std::span<const QuadratureRequest> factors);

/// Photon-number distribution of the reduced single-mode state of `mode`,
/// computed on a Fock basis truncated so the discarded tail is < tail_tolerance.
/// The reduced state must be zero-mean.
std::vector<double> photon_number_distribution(const GaussianState &state, ModeId mode, double tail_tolerance = 1e-9);

class PhotonCounter {
   public:
    PhotonCounter(const GaussianState &state, ModeId mode);

    const std::vector<double> &probabilities() const {
        return probabilities_;
    }
    uint64_t sample(SplitMix64 &rng) const;

   private:
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
};

uint64_t photon_number_sample(const GaussianState &state, ModeId mode, SplitMix64 &rng);

}  // namespace cvbell::gaussian

#endif
