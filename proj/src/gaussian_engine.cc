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

#include "cvbell/gaussian_engine.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "cvbell/fock_core.h"

namespace cvbell::gaussian {

namespace {

constexpr double SYMMETRY_TOLERANCE = 1e-12;
constexpr double PHYSICALITY_TOLERANCE = 1e-10;
constexpr double ZERO_MEAN_TOLERANCE = 1e-12;

}  // namespace

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd &cov) {
    if (cov.size() == 0) {
        return cov;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

GaussianState::GaussianState(std::vector<ModeId> modes, Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : modes_(std::move(modes)), mean_(std::move(mean)), cov_(std::move(cov)) {
    std::set<ModeId> seen;
    for (ModeId m : modes_) {
        if (!seen.insert(m).second) {
            throw std::invalid_argument("Duplicate mode " + std::string(mode_name(m)) + " in Gaussian state.");
        }
    }
    auto n = static_cast<Eigen::Index>(2 * modes_.size());
    if (mean_.size() != n || cov_.rows() != n || cov_.cols() != n) {
        throw std::invalid_argument("Gaussian state mean/covariance do not match the mode count.");
    }
    if (n > 0 && (cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > SYMMETRY_TOLERANCE) {
        throw std::invalid_argument("Covariance matrix is not symmetric.");
    }
    if (n > 0 && physicality_margin(cov_) < -PHYSICALITY_TOLERANCE) {
        throw std::invalid_argument("Covariance violates the uncertainty principle (cov + i*Omega not PSD).");
    }
}

bool GaussianState::contains(ModeId mode) const {
    return std::find(modes_.begin(), modes_.end(), mode) != modes_.end();
}

Eigen::Index GaussianState::offset(ModeId mode) const {
    auto it = std::find(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end()) {
        throw std::invalid_argument("Mode " + std::string(mode_name(mode)) + " is not part of this Gaussian state.");
    }
    return 2 * static_cast<Eigen::Index>(it - modes_.begin());
}

Eigen::MatrixXd symplectic_form(size_t mode_count) {
    auto n = static_cast<Eigen::Index>(2 * mode_count);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; k += 2) {
        omega(k, k + 1) = 1;
        omega(k + 1, k) = -1;
    }
    return omega;
}

double physicality_margin(const Eigen::MatrixXd &cov) {
    Eigen::MatrixXcd m = cov.cast<std::complex<double>>();
    m += std::complex<double>(0, 1) * symplectic_form(static_cast<size_t>(cov.rows() / 2)).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

GaussianState vacuum_state(std::vector<ModeId> modes) {
    if (modes.empty()) {
        throw std::invalid_argument("vacuum_state needs at least one mode.");
    }
    auto n = static_cast<Eigen::Index>(2 * modes.size());
    return GaussianState(std::move(modes), Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
}

GaussianState apply_symplectic(const GaussianState &state, const Eigen::MatrixXd &transform) {
    Eigen::MatrixXd cov = transform * state.cov() * transform.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    return GaussianState(state.modes(), transform * state.mean(), std::move(cov));
}

Eigen::MatrixXd two_mode_squeeze_matrix(const GaussianState &state, ModeId mode_i, ModeId mode_j, double r) {
    if (mode_i == mode_j) {
        throw std::invalid_argument("Two-mode squeezing needs two distinct modes.");
    }
    if (!(r >= 0) || !std::isfinite(r)) {
        throw std::invalid_argument("Squeezing parameter must be finite and >= 0.");
    }
    auto n = static_cast<Eigen::Index>(2 * state.mode_count());
    Eigen::Index i = state.offset(mode_i);
    Eigen::Index j = state.offset(mode_j);
    double c = std::cosh(r);
    double s = std::sinh(r);
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t(i, i) = c;
    t(i, j) = s;
    t(j, j) = c;
    t(j, i) = s;
    t(i + 1, i + 1) = c;
    t(i + 1, j + 1) = -s;
    t(j + 1, j + 1) = c;
    t(j + 1, i + 1) = -s;
    return t;
}

GaussianState two_mode_squeeze(const GaussianState &state, ModeId mode_i, ModeId mode_j, double r) {
    return apply_symplectic(state, two_mode_squeeze_matrix(state, mode_i, mode_j, r));
}

Eigen::MatrixXd polarization_rotation_matrix(const GaussianState &state, ModeId mode_h, ModeId mode_v, double theta) {
    if (mode_h == mode_v) {
        throw std::invalid_argument("Polarization rotation needs two distinct modes.");
    }
    auto n = static_cast<Eigen::Index>(2 * state.mode_count());
    Eigen::Index h = state.offset(mode_h);
    Eigen::Index v = state.offset(mode_v);
    double c = std::cos(theta);
    double s = std::sin(theta);
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index q = 0; q < 2; q++) {
        t(h + q, h + q) = c;
        t(h + q, v + q) = s;
        t(v + q, h + q) = -s;
        t(v + q, v + q) = c;
    }
    return t;
}

GaussianState polarization_rotation(const GaussianState &state, ModeId mode_h, ModeId mode_v, double theta) {
    return apply_symplectic(state, polarization_rotation_matrix(state, mode_h, mode_v, theta));
}

GaussianState reset_to_vacuum(const GaussianState &state, std::span<const ModeId> modes) {
    Eigen::VectorXd mean = state.mean();
    Eigen::MatrixXd cov = state.cov();
    for (ModeId m : modes) {
        Eigen::Index k = state.offset(m);
        mean.segment(k, 2).setZero();
        cov.middleRows(k, 2).setZero();
        cov.middleCols(k, 2).setZero();
        cov.block(k, k, 2, 2).setIdentity();
    }
    return GaussianState(state.modes(), std::move(mean), std::move(cov));
}

QuadratureRequest make_request(ModeId mode, double phase) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double wrapped = std::fmod(phase, two_pi);
    if (wrapped < 0) {
        wrapped += two_pi;
    }
    if (wrapped >= two_pi) {
        wrapped = 0;
    }
    return {mode, wrapped};
}

Eigen::RowVectorXd quadrature_functional(const GaussianState &state, const QuadratureRequest &request) {
    Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(2 * state.mode_count()));
    Eigen::Index k = state.offset(request.mode);
    f(k) = std::cos(request.phase);
    f(k + 1) = std::sin(request.phase);
    return f;
}

QuadratureSampler::QuadratureSampler(const GaussianState &state, std::span<const QuadratureRequest> requests) {
    std::set<ModeId> seen;
    for (const auto &r : requests) {
        if (!seen.insert(r.mode).second) {
            throw std::invalid_argument(
                "Two quadratures of mode " + std::string(mode_name(r.mode)) +
                " requested in one shot; different quadrature components do not commute and cannot be measured "
                "simultaneously.");
        }
    }
    auto k = static_cast<Eigen::Index>(requests.size());
    Eigen::MatrixXd f(k, static_cast<Eigen::Index>(2 * state.mode_count()));
    for (Eigen::Index a = 0; a < k; a++) {
        f.row(a) = quadrature_functional(state, requests[static_cast<size_t>(a)]);
    }
    mean_ = f * state.mean();
    cov_ = f * state.cov() * f.transpose();
    factor_ = covariance_factor(cov_);
}

void QuadratureSampler::sample_into(SplitMix64 &rng, std::span<double> out) const {
    if (out.size() != size()) {
        throw std::invalid_argument("Output span has the wrong size.");
    }
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index a = 0; a < z.size(); a++) {
        z(a) = normal(rng);
    }
    Eigen::VectorXd x = mean_ + factor_ * z;
    std::copy(x.data(), x.data() + x.size(), out.begin());
}

std::vector<double> QuadratureSampler::sample(SplitMix64 &rng) const {
    std::vector<double> out(size());
    sample_into(rng, out);
    return out;
}

std::vector<double> joint_quadrature_sample(
    const GaussianState &state, std::span<const QuadratureRequest> requests, SplitMix64 &rng) {
    return QuadratureSampler(state, requests).sample(rng);
}

double analytic_moment(const GaussianState &state, std::span<const QuadratureRequest> factors) {
    if (factors.size() > 4) {
        throw std::invalid_argument("analytic_moment supports at most four quadrature factors.");
    }
    std::vector<Eigen::RowVectorXd> f;
    for (const auto &r : factors) {
        f.push_back(quadrature_functional(state, r));
        if (std::abs(f.back().dot(state.mean())) > ZERO_MEAN_TOLERANCE) {
            throw std::invalid_argument("analytic_moment requires a zero-mean state.");
        }
    }
    auto c = [&](size_t a, size_t b) -> double { return (f[a] * state.cov()).dot(f[b]); };
    switch (f.size()) {
        case 0:
            return 1.0;
        case 2:
            return c(0, 1);
        case 4:
            return c(0, 1) * c(2, 3) + c(0, 2) * c(1, 3) + c(0, 3) * c(1, 2);
        default:
            return 0.0;
    }
}

namespace {

std::vector<double> thermal_distribution(double mean_photons, double tail_tolerance) {
    std::vector<double> p;
    if (mean_photons <= 0) {
        return {1.0};
    }
    double ratio = mean_photons / (1 + mean_photons);
    double term = 1 / (1 + mean_photons);
    double total = 0;
    while (1 - total >= tail_tolerance) {
        p.push_back(term);
        total += term;
        term *= ratio;
        if (p.size() > 100000) {
            throw fock::TruncationError("Thermal distribution does not converge; mean photon number too large.");
        }
    }
    return p;
}

}  // namespace

std::vector<double> photon_number_distribution(const GaussianState &state, ModeId mode, double tail_tolerance) {
    Eigen::Index k = state.offset(mode);
    if (state.mean().segment(k, 2).cwiseAbs().maxCoeff() > ZERO_MEAN_TOLERANCE) {
        throw std::invalid_argument("photon_number_distribution requires a zero-mean reduced state.");
    }
    Eigen::Matrix2d v = state.cov().block(k, k, 2, 2);
    double nu = std::sqrt(std::max(v.determinant(), 1.0));
    double mean_photons = std::max(0.0, (nu - 1) / 2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(v / nu, Eigen::EigenvaluesOnly);
    double squeeze = 0.5 * std::log(std::max(eig.eigenvalues()(1), 1.0));
    if (squeeze < 1e-12) {
        // Rotations do not change photon statistics: a thermal state remains.
        return thermal_distribution(mean_photons, tail_tolerance);
    }

    // V = nu * R diag(e^{2s}, e^{-2s}) R^T: squeezed thermal state. Its photon
    // distribution is P(n) = sum_m p_th(m) |<n|S(s)|m>|^2.
    auto thermal = thermal_distribution(mean_photons, tail_tolerance * 1e-3);
    constexpr size_t MAX_LEVEL = 256;
    for (size_t top = 16;; top *= 2) {
        if (top > MAX_LEVEL) {
            throw fock::TruncationError(
                "Photon-number distribution needs more than " + std::to_string(MAX_LEVEL) +
                " Fock levels; squeezing or thermal occupation too large.");
        }
        if (thermal.size() > top) {
            continue;
        }
        size_t work = 2 * top + 32;
        Eigen::MatrixXcd s = fock::single_mode_squeeze_matrix(work, squeeze);
        std::vector<double> p(top + 1, 0.0);
        for (size_t n = 0; n <= top; n++) {
            for (size_t m = 0; m < thermal.size(); m++) {
                p[n] += thermal[m] * std::norm(s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
            }
        }
        double total = 0;
        for (double x : p) {
            total += x;
        }
        if (1 - total < tail_tolerance) {
            while (p.size() > 1 && p.back() < 1e-300) {
                p.pop_back();
            }
            return p;
        }
    }
}

PhotonCounter::PhotonCounter(const GaussianState &state, ModeId mode)
    : probabilities_(photon_number_distribution(state, mode)) {
    double total = 0;
    for (double p : probabilities_) {
        total += p;
        cumulative_.push_back(total);
    }
}

uint64_t PhotonCounter::sample(SplitMix64 &rng) const {
    double u = uniform_unit(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        // u fell into the discarded tail (< 1e-9); report the largest kept count.
        return cumulative_.size() - 1;
    }
    return static_cast<uint64_t>(it - cumulative_.begin());
}

uint64_t photon_number_sample(const GaussianState &state, ModeId mode, SplitMix64 &rng) {
    return PhotonCounter(state, mode).sample(rng);
}

}  // namespace cvbell::gaussian
