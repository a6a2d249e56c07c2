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

#ifndef _CVBELL_FOCK_CORE_H
#define _CVBELL_FOCK_CORE_H

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "cvbell/modes.h"

namespace cvbell::fock {

using Complex = std::complex<double>;

inline constexpr size_t MIN_TRUNCATION = 2;
inline constexpr size_t MAX_TRUNCATION = 16;
inline constexpr size_t MAX_MODES = 6;
/// Largest space for which dense operator matrices are materialized.
inline constexpr size_t MAX_DENSE_DIMENSION = 4096;
/// Largest space for which state vectors are materialized.
inline constexpr size_t MAX_VECTOR_DIMENSION = size_t{1} << 22;

/// Raised when a truncated Fock space cannot hold a state to the requested accuracy.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tensor product of truncated single-mode Fock spaces.
///
/// Basis index ordering: the first listed mode is the most significant digit
/// in base (truncation + 1), i.e. index = sum_k n_k * stride_k with the last
/// mode having stride 1.
class MultiModeSpace {
   public:
    MultiModeSpace(std::vector<ModeId> modes, size_t truncation);

    const std::vector<ModeId> &modes() const {
        return modes_;
    }
    size_t truncation() const {
        return truncation_;
    }
    size_t levels() const {
        return truncation_ + 1;
    }
    size_t dimension() const {
        return dimension_;
    }

    bool contains(ModeId mode) const;
    /// Position of `mode` in the tensor ordering. Throws std::invalid_argument if absent.
    size_t position(ModeId mode) const;
    size_t stride(ModeId mode) const;
    size_t occupation(size_t basis_index, ModeId mode) const;
    size_t max_occupation(size_t basis_index) const;
    size_t index_of(const std::map<ModeId, size_t> &occupations) const;

    bool operator==(const MultiModeSpace &other) const = default;

   private:
    std::vector<ModeId> modes_;
    std::vector<size_t> strides_;
    size_t truncation_;
    size_t dimension_;
};

MultiModeSpace build_space(std::vector<ModeId> modes, size_t truncation);

enum class OperatorKind { annihilate, create, x1, x2, number };

/// Dense operator on a MultiModeSpace.
class FockOperator {
   public:
    /// Throws if the matrix is not square of the space's dimension, or if
    /// `hermitian` is set and max |M - M^dagger| >= 1e-12.
    FockOperator(MultiModeSpace space, Eigen::MatrixXcd matrix, bool hermitian = false);

    const MultiModeSpace &space() const {
        return space_;
    }
    const Eigen::MatrixXcd &matrix() const {
        return matrix_;
    }
    bool hermitian() const {
        return hermitian_;
    }

    FockOperator operator*(const FockOperator &rhs) const;
    FockOperator operator+(const FockOperator &rhs) const;
    FockOperator operator-(const FockOperator &rhs) const;
    FockOperator scaled(double factor) const;

   private:
    MultiModeSpace space_;
    Eigen::MatrixXcd matrix_;
    bool hermitian_;
};

FockOperator identity_operator(const MultiModeSpace &space);

/// Single-mode operator embedded in the full space (identity on the other modes).
/// x1 = C^dagger + C, x2 = i (C^dagger - C).
FockOperator mode_operator(const MultiModeSpace &space, ModeId mode, OperatorKind kind);

/// R = scale * (X_s1^2 + X_s2^2 - X_v1^2 - X_v2^2). The default scale of 1/4
/// makes R equal to n_s - n_v; any other value is only useful for fault injection.
FockOperator count_rate_operator(
    const MultiModeSpace &space, ModeId signal_mode, ModeId vacuum_mode, double scale = 0.25);

/// Largest elementwise |lhs - rhs| over basis pairs whose occupations are all
/// <= max_occupation.
double guarded_deviation(const FockOperator &lhs, const FockOperator &rhs, size_t max_occupation);

/// Max deviation between the count-rate operator and n_s - n_v. With
/// `guarded`, only Fock states with every occupation <= N-2 are compared;
/// the top two levels are corrupted by truncating C^dagger^2.
double verify_count_rate_identity(
    const MultiModeSpace &space, ModeId signal_mode, ModeId vacuum_mode, bool guarded = true, double scale = 0.25);

/// Normalized pure state on a MultiModeSpace.
class StateVector {
   public:
    /// Requires ||amplitudes|| = 1 within 1e-12.
    StateVector(MultiModeSpace space, Eigen::VectorXcd amplitudes);

    /// Rescales to unit norm; throws on a zero vector.
    static StateVector normalized(MultiModeSpace space, Eigen::VectorXcd amplitudes);

    const MultiModeSpace &space() const {
        return space_;
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amplitudes_;
    }

   private:
    MultiModeSpace space_;
    Eigen::VectorXcd amplitudes_;
};

/// |n_1, n_2, ...>; modes not listed are in vacuum.
StateVector fock_state(const MultiModeSpace &space, const std::map<ModeId, size_t> &occupations);

/// Two-mode squeezed vacuum on (mode_i, mode_j), vacuum elsewhere:
/// sum_n tanh(r)^n |n>_i |n>_j / cosh(r), truncated then renormalized.
/// Throws TruncationError when the discarded tail mass is >= 1e-6.
StateVector two_mode_squeezed_vector(const MultiModeSpace &space, ModeId mode_i, ModeId mode_j, double r);

/// State on the concatenated space; both inputs must share the truncation and
/// have disjoint modes.
StateVector tensor_product(const StateVector &first, const StateVector &second);

/// Same amplitudes in a space with a larger truncation (zero padded).
StateVector embed(const StateVector &state, size_t new_truncation);

Complex expectation(const StateVector &state, const FockOperator &op);

/// Matrix-free operator algebra, for spaces too large for dense matrices.
struct OperatorTerm {
    ModeId mode;
    OperatorKind kind;
    Complex coefficient;
};
using LinearCombination = std::vector<OperatorTerm>;

Eigen::VectorXcd apply(const MultiModeSpace &space, ModeId mode, OperatorKind kind, const Eigen::VectorXcd &vector);
Eigen::VectorXcd apply(const MultiModeSpace &space, const LinearCombination &op, const Eigen::VectorXcd &vector);

/// <psi| F_1 F_2 ... F_k |psi>, with F_k applied first. Each application is
/// truncated to the space, so callers should embed the state with enough
/// headroom (k levels) for exact results.
Complex product_expectation(const StateVector &state, std::span<const LinearCombination> factors);

/// Quadrature of the output mode c_1 a_1 + c_2 a_2 + ... of a passive network.
/// kind must be x1 or x2.
LinearCombination passive_quadrature(std::span<const std::pair<ModeId, double>> weights, OperatorKind kind);

/// exp((s/2)(a^2 - a^dagger^2)) on a single mode truncated at `truncation`.
/// Accurate only well below the truncation.
Eigen::MatrixXcd single_mode_squeeze_matrix(size_t truncation, double s);

}  // namespace cvbell::fock

#endif
