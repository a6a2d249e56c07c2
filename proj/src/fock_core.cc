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

#include "cvbell/fock_core.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace cvbell::fock {

namespace {

const Complex I_UNIT{0.0, 1.0};

void require_dense(const MultiModeSpace &space) {
    if (space.dimension() > MAX_DENSE_DIMENSION) {
        throw TruncationError(
            "Space dimension " + std::to_string(space.dimension()) + " exceeds the dense operator limit of " +
            std::to_string(MAX_DENSE_DIMENSION) + "; use the matrix-free apply() instead.");
    }
}

void require_same_space(const MultiModeSpace &a, const MultiModeSpace &b) {
    if (!(a == b)) {
        throw std::invalid_argument("Operands live on different Fock spaces.");
    }
}

}  // namespace

MultiModeSpace::MultiModeSpace(std::vector<ModeId> modes, size_t truncation)
    : modes_(std::move(modes)), truncation_(truncation), dimension_(1) {
    if (truncation_ < MIN_TRUNCATION || truncation_ > MAX_TRUNCATION) {
        throw TruncationError(
            "Truncation " + std::to_string(truncation_) + " outside [" + std::to_string(MIN_TRUNCATION) + ", " +
            std::to_string(MAX_TRUNCATION) + "].");
    }
    if (modes_.empty() || modes_.size() > MAX_MODES) {
        throw std::invalid_argument("A Fock space needs between 1 and " + std::to_string(MAX_MODES) + " modes.");
    }
    std::set<ModeId> seen;
    for (ModeId m : modes_) {
        if (!seen.insert(m).second) {
            throw std::invalid_argument("Duplicate mode label " + std::string(mode_name(m)) + ".");
        }
    }
    strides_.assign(modes_.size(), 1);
    for (size_t k = modes_.size(); k-- > 0;) {
        strides_[k] = dimension_;
        dimension_ *= levels();
    }
}

bool MultiModeSpace::contains(ModeId mode) const {
    return std::find(modes_.begin(), modes_.end(), mode) != modes_.end();
}

size_t MultiModeSpace::position(ModeId mode) const {
    auto it = std::find(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end()) {
        throw std::invalid_argument("Mode " + std::string(mode_name(mode)) + " is not part of this space.");
    }
    return static_cast<size_t>(it - modes_.begin());
}

size_t MultiModeSpace::stride(ModeId mode) const {
    return strides_[position(mode)];
}

size_t MultiModeSpace::occupation(size_t basis_index, ModeId mode) const {
    return (basis_index / stride(mode)) % levels();
}

size_t MultiModeSpace::max_occupation(size_t basis_index) const {
    size_t result = 0;
    for (size_t k = 0; k < modes_.size(); k++) {
        result = std::max(result, (basis_index / strides_[k]) % levels());
    }
    return result;
}

size_t MultiModeSpace::index_of(const std::map<ModeId, size_t> &occupations) const {
    size_t index = 0;
    for (const auto &[mode, n] : occupations) {
        if (n > truncation_) {
            throw std::invalid_argument("Occupation exceeds truncation.");
        }
        index += n * stride(mode);
    }
    return index;
}

MultiModeSpace build_space(std::vector<ModeId> modes, size_t truncation) {
    return MultiModeSpace(std::move(modes), truncation);
}

FockOperator::FockOperator(MultiModeSpace space, Eigen::MatrixXcd matrix, bool hermitian)
    : space_(std::move(space)), matrix_(std::move(matrix)), hermitian_(hermitian) {
    auto dim = static_cast<Eigen::Index>(space_.dimension());
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw std::invalid_argument("Operator matrix does not match the space dimension.");
    }
    if (hermitian_) {
        double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (asym >= 1e-12) {
            throw std::invalid_argument("Operator flagged Hermitian but max |M - M^dagger| = " + std::to_string(asym));
        }
    }
}

FockOperator FockOperator::operator*(const FockOperator &rhs) const {
    require_same_space(space_, rhs.space_);
    // A product of Hermitian operators is Hermitian only if they commute; don't claim it.
    return FockOperator(space_, matrix_ * rhs.matrix_, false);
}

FockOperator FockOperator::operator+(const FockOperator &rhs) const {
    require_same_space(space_, rhs.space_);
    return FockOperator(space_, matrix_ + rhs.matrix_, hermitian_ && rhs.hermitian_);
}

FockOperator FockOperator::operator-(const FockOperator &rhs) const {
    require_same_space(space_, rhs.space_);
    return FockOperator(space_, matrix_ - rhs.matrix_, hermitian_ && rhs.hermitian_);
}

FockOperator FockOperator::scaled(double factor) const {
    return FockOperator(space_, matrix_ * factor, hermitian_);
}

FockOperator identity_operator(const MultiModeSpace &space) {
    require_dense(space);
    auto dim = static_cast<Eigen::Index>(space.dimension());
    return FockOperator(space, Eigen::MatrixXcd::Identity(dim, dim), true);
}

FockOperator mode_operator(const MultiModeSpace &space, ModeId mode, OperatorKind kind) {
    require_dense(space);
    size_t stride = space.stride(mode);
    size_t top = space.truncation();
    auto dim = static_cast<Eigen::Index>(space.dimension());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t i = 0; i < space.dimension(); i++) {
        size_t n = (i / stride) % space.levels();
        auto col = static_cast<Eigen::Index>(i);
        auto up = static_cast<Eigen::Index>(i + stride);
        auto down = static_cast<Eigen::Index>(i - stride);
        double raise = std::sqrt(static_cast<double>(n + 1));
        double lower = std::sqrt(static_cast<double>(n));
        switch (kind) {
            case OperatorKind::annihilate:
                if (n > 0) m(down, col) = lower;
                break;
            case OperatorKind::create:
                if (n < top) m(up, col) = raise;
                break;
            case OperatorKind::x1:
                if (n > 0) m(down, col) = lower;
                if (n < top) m(up, col) = raise;
                break;
            case OperatorKind::x2:
                if (n > 0) m(down, col) = -I_UNIT * lower;
                if (n < top) m(up, col) = I_UNIT * raise;
                break;
            case OperatorKind::number:
                m(col, col) = static_cast<double>(n);
                break;
        }
    }
    bool hermitian = kind == OperatorKind::x1 || kind == OperatorKind::x2 || kind == OperatorKind::number;
    return FockOperator(space, std::move(m), hermitian);
}

FockOperator count_rate_operator(const MultiModeSpace &space, ModeId signal_mode, ModeId vacuum_mode, double scale) {
    if (signal_mode == vacuum_mode) {
        throw std::invalid_argument("Count rate needs distinct signal and vacuum modes.");
    }
    auto square = [&](ModeId mode, OperatorKind kind) {
        auto x = mode_operator(space, mode, kind);
        // X^2 of a Hermitian X is Hermitian; restore the flag lost in operator*.
        return FockOperator(space, x.matrix() * x.matrix(), true);
    };
    auto sum = square(signal_mode, OperatorKind::x1) + square(signal_mode, OperatorKind::x2) -
               square(vacuum_mode, OperatorKind::x1) - square(vacuum_mode, OperatorKind::x2);
    return sum.scaled(scale);
}

double guarded_deviation(const FockOperator &lhs, const FockOperator &rhs, size_t max_occupation) {
    require_same_space(lhs.space(), rhs.space());
    const auto &space = lhs.space();
    std::vector<Eigen::Index> kept;
    for (size_t i = 0; i < space.dimension(); i++) {
        if (space.max_occupation(i) <= max_occupation) {
            kept.push_back(static_cast<Eigen::Index>(i));
        }
    }
    double worst = 0;
    for (auto r : kept) {
        for (auto c : kept) {
            worst = std::max(worst, std::abs(lhs.matrix()(r, c) - rhs.matrix()(r, c)));
        }
    }
    return worst;
}

double verify_count_rate_identity(
    const MultiModeSpace &space, ModeId signal_mode, ModeId vacuum_mode, bool guarded, double scale) {
    auto rate = count_rate_operator(space, signal_mode, vacuum_mode, scale);
    auto photon_difference =
        mode_operator(space, signal_mode, OperatorKind::number) - mode_operator(space, vacuum_mode, OperatorKind::number);
    size_t limit = guarded ? space.truncation() - 2 : space.truncation();
    return guarded_deviation(rate, photon_difference, limit);
}

StateVector::StateVector(MultiModeSpace space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != static_cast<Eigen::Index>(space_.dimension())) {
        throw std::invalid_argument("Amplitude vector does not match the space dimension.");
    }
    double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("State vector is not normalized (norm " + std::to_string(norm) + ").");
    }
}

StateVector StateVector::normalized(MultiModeSpace space, Eigen::VectorXcd amplitudes) {
    double norm = amplitudes.norm();
    if (!(norm > 0)) {
        throw std::invalid_argument("Cannot normalize a zero vector.");
    }
    amplitudes /= norm;
    return StateVector(std::move(space), std::move(amplitudes));
}

namespace {

Eigen::VectorXcd zero_vector(const MultiModeSpace &space) {
    if (space.dimension() > MAX_VECTOR_DIMENSION) {
        throw std::invalid_argument("Space dimension " + std::to_string(space.dimension()) + " is too large for a state vector.");
    }
    return Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
}

}  // namespace

StateVector fock_state(const MultiModeSpace &space, const std::map<ModeId, size_t> &occupations) {
    auto v = zero_vector(space);
    v(static_cast<Eigen::Index>(space.index_of(occupations))) = 1.0;
    return StateVector(space, std::move(v));
}

StateVector two_mode_squeezed_vector(const MultiModeSpace &space, ModeId mode_i, ModeId mode_j, double r) {
    if (!(r >= 0) || !std::isfinite(r)) {
        throw std::invalid_argument("Squeezing parameter must be finite and >= 0.");
    }
    if (mode_i == mode_j) {
        throw std::invalid_argument("Two-mode squeezing needs two distinct modes.");
    }
    size_t si = space.stride(mode_i);
    size_t sj = space.stride(mode_j);
    double t = std::tanh(r);
    double c = std::cosh(r);
    auto v = zero_vector(space);
    double kept_mass = 0;
    double power = 1;
    for (size_t n = 0; n <= space.truncation(); n++) {
        double amp = power / c;
        v(static_cast<Eigen::Index>(n * si + n * sj)) = amp;
        kept_mass += amp * amp;
        power *= t;
    }
    double tail = 1.0 - kept_mass;
    if (tail >= 1e-6) {
        throw TruncationError(
            "Two-mode squeezed vector with r=" + std::to_string(r) + " loses tail mass " + std::to_string(tail) +
            " at truncation " + std::to_string(space.truncation()) + "; raise the truncation or lower r.");
    }
    return StateVector::normalized(space, std::move(v));
}

StateVector tensor_product(const StateVector &first, const StateVector &second) {
    const auto &s1 = first.space();
    const auto &s2 = second.space();
    if (s1.truncation() != s2.truncation()) {
        throw std::invalid_argument("Tensor factors must share a truncation.");
    }
    std::vector<ModeId> modes = s1.modes();
    modes.insert(modes.end(), s2.modes().begin(), s2.modes().end());
    MultiModeSpace space(std::move(modes), s1.truncation());
    auto v = zero_vector(space);
    auto d2 = static_cast<Eigen::Index>(s2.dimension());
    for (Eigen::Index i = 0; i < first.amplitudes().size(); i++) {
        v.segment(i * d2, d2) = first.amplitudes()(i) * second.amplitudes();
    }
    return StateVector::normalized(std::move(space), std::move(v));
}

StateVector embed(const StateVector &state, size_t new_truncation) {
    const auto &old_space = state.space();
    if (new_truncation < old_space.truncation()) {
        throw std::invalid_argument("embed() can only raise the truncation.");
    }
    MultiModeSpace space(old_space.modes(), new_truncation);
    auto v = zero_vector(space);
    for (size_t i = 0; i < old_space.dimension(); i++) {
        size_t j = 0;
        for (ModeId m : old_space.modes()) {
            j += old_space.occupation(i, m) * space.stride(m);
        }
        v(static_cast<Eigen::Index>(j)) = state.amplitudes()(static_cast<Eigen::Index>(i));
    }
    return StateVector(std::move(space), std::move(v));
}

Complex expectation(const StateVector &state, const FockOperator &op) {
    require_same_space(state.space(), op.space());
    const auto &psi = state.amplitudes();
    return psi.dot(op.matrix() * psi);
}

Eigen::VectorXcd apply(const MultiModeSpace &space, ModeId mode, OperatorKind kind, const Eigen::VectorXcd &vector) {
    size_t stride = space.stride(mode);
    size_t top = space.truncation();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(vector.size());
    for (size_t i = 0; i < space.dimension(); i++) {
        Complex amp = vector(static_cast<Eigen::Index>(i));
        if (amp == Complex{}) {
            continue;
        }
        size_t n = (i / stride) % space.levels();
        auto up = static_cast<Eigen::Index>(i + stride);
        auto down = static_cast<Eigen::Index>(i - stride);
        double raise = std::sqrt(static_cast<double>(n + 1));
        double lower = std::sqrt(static_cast<double>(n));
        bool can_raise = n < top;
        bool can_lower = n > 0;
        switch (kind) {
            case OperatorKind::annihilate:
                if (can_lower) out(down) += lower * amp;
                break;
            case OperatorKind::create:
                if (can_raise) out(up) += raise * amp;
                break;
            case OperatorKind::x1:
                if (can_lower) out(down) += lower * amp;
                if (can_raise) out(up) += raise * amp;
                break;
            case OperatorKind::x2:
                if (can_lower) out(down) += -I_UNIT * lower * amp;
                if (can_raise) out(up) += I_UNIT * raise * amp;
                break;
            case OperatorKind::number:
                out(static_cast<Eigen::Index>(i)) += static_cast<double>(n) * amp;
                break;
        }
    }
    return out;
}

Eigen::VectorXcd apply(const MultiModeSpace &space, const LinearCombination &op, const Eigen::VectorXcd &vector) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(vector.size());
    for (const auto &term : op) {
        out += term.coefficient * apply(space, term.mode, term.kind, vector);
    }
    return out;
}

Complex product_expectation(const StateVector &state, std::span<const LinearCombination> factors) {
    Eigen::VectorXcd v = state.amplitudes();
    for (size_t k = factors.size(); k-- > 0;) {
        v = apply(state.space(), factors[k], v);
    }
    return state.amplitudes().dot(v);
}

LinearCombination passive_quadrature(std::span<const std::pair<ModeId, double>> weights, OperatorKind kind) {
    if (kind != OperatorKind::x1 && kind != OperatorKind::x2) {
        throw std::invalid_argument("passive_quadrature needs kind x1 or x2.");
    }
    LinearCombination result;
    for (const auto &[mode, w] : weights) {
        result.push_back({mode, kind, Complex{w, 0.0}});
    }
    return result;
}

Eigen::MatrixXcd single_mode_squeeze_matrix(size_t truncation, double s) {
    auto levels = static_cast<Eigen::Index>(truncation + 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(levels, levels);
    for (Eigen::Index n = 1; n < levels; n++) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    Eigen::MatrixXd a2 = a * a;
    Eigen::MatrixXd generator = 0.5 * s * (a2 - a2.transpose());
    // generator is real antisymmetric, so i*generator is Hermitian.
    Eigen::MatrixXcd hermitian = I_UNIT * generator.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitian);
    Eigen::VectorXcd phases = (-I_UNIT * eig.eigenvalues().cast<Complex>()).array().exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace cvbell::fock
