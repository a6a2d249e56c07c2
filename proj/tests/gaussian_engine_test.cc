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

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

#include "cvbell/fock_core.h"

namespace cvbell::gaussian {
namespace {

using std::numbers::pi;

GaussianState tms(double r) {
    auto vac = vacuum_state({ModeId::A_H, ModeId::B_H});
    return two_mode_squeeze(vac, ModeId::A_H, ModeId::B_H, r);
}

TEST(GaussianStateTest, VacuumIsIdentity) {
    auto vac = vacuum_state({ModeId::A_H, ModeId::V_A, ModeId::B_H});
    EXPECT_EQ(vac.mode_count(), 3u);
    EXPECT_TRUE(vac.cov().isIdentity(0));
    EXPECT_TRUE(vac.mean().isZero(0));
    EXPECT_NEAR(physicality_margin(vac.cov()), 0.0, 1e-12);
}

TEST(GaussianStateTest, RejectsUnphysicalCovariance) {
    Eigen::MatrixXd cov = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(GaussianState({ModeId::A_H}, Eigen::VectorXd::Zero(2), cov), std::invalid_argument);
}

TEST(GaussianStateTest, RejectsAsymmetricCovariance) {
    Eigen::MatrixXd cov = 2 * Eigen::MatrixXd::Identity(2, 2);
    cov(0, 1) = 0.1;
    EXPECT_THROW(GaussianState({ModeId::A_H}, Eigen::VectorXd::Zero(2), cov), std::invalid_argument);
}

TEST(GaussianStateTest, RejectsDuplicateModes) {
    EXPECT_THROW(vacuum_state({ModeId::A_H, ModeId::A_H}), std::invalid_argument);
}

TEST(GaussianStateTest, UnknownModeRejected) {
    auto vac = vacuum_state({ModeId::A_H});
    EXPECT_THROW(vac.offset(ModeId::B_H), std::invalid_argument);
    EXPECT_THROW(two_mode_squeeze(vac, ModeId::A_H, ModeId::B_H, 0.1), std::invalid_argument);
}

TEST(TwoModeSqueezeTest, Covariance) {
    double r = 0.5;
    auto s = tms(r);
    const auto &c = s.cov();
    EXPECT_NEAR(c(0, 0), std::cosh(2 * r), 1e-14);
    EXPECT_NEAR(c(1, 1), std::cosh(2 * r), 1e-14);
    EXPECT_NEAR(c(0, 2), std::sinh(2 * r), 1e-14);
    EXPECT_NEAR(c(1, 3), -std::sinh(2 * r), 1e-14);
    EXPECT_NEAR(c(0, 3), 0.0, 1e-14);
    EXPECT_GE(physicality_margin(c), -1e-12);
}

TEST(TwoModeSqueezeTest, ZeroIsIdentity) {
    auto s = tms(0.0);
    EXPECT_TRUE(s.cov().isIdentity(1e-15));
}

TEST(TwoModeSqueezeTest, SymplecticPreservesForm) {
    auto vac = vacuum_state({ModeId::A_H, ModeId::B_H});
    Eigen::MatrixXd s = two_mode_squeeze_matrix(vac, ModeId::A_H, ModeId::B_H, 0.7);
    Eigen::MatrixXd omega = symplectic_form(2);
    EXPECT_LT((s * omega * s.transpose() - omega).norm(), 1e-12);
}

TEST(PolarizationRotationTest, OrthogonalAndSymplectic) {
    auto vac = vacuum_state({ModeId::A_H, ModeId::A_V});
    Eigen::MatrixXd m = polarization_rotation_matrix(vac, ModeId::A_H, ModeId::A_V, 0.3);
    Eigen::MatrixXd omega = symplectic_form(2);
    EXPECT_LT((m * m.transpose() - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-14);
    EXPECT_LT((m * omega * m.transpose() - omega).norm(), 1e-14);
    auto rotated = polarization_rotation(vac, ModeId::A_H, ModeId::A_V, 0.3);
    EXPECT_TRUE(rotated.cov().isIdentity(1e-14));
}

TEST(PolarizationRotationTest, MovesPhotonsBetweenPolarizations) {
    // Squeeze A_H with B_H only; rotating station A by pi/2 moves the
    // correlation to A_V.
    auto vac = vacuum_state({ModeId::A_H, ModeId::A_V, ModeId::B_H});
    auto s = two_mode_squeeze(vac, ModeId::A_H, ModeId::B_H, 0.5);
    auto rot = polarization_rotation(s, ModeId::A_H, ModeId::A_V, pi / 2);
    EXPECT_NEAR(rot.cov()(rot.offset(ModeId::A_H), rot.offset(ModeId::A_H)), 1.0, 1e-12);
    EXPECT_NEAR(rot.cov()(rot.offset(ModeId::A_V), rot.offset(ModeId::A_V)), std::cosh(1.0), 1e-12);
    double cross = rot.cov()(rot.offset(ModeId::A_V), rot.offset(ModeId::B_H));
    EXPECT_NEAR(std::abs(cross), std::sinh(1.0), 1e-12);
}

TEST(ResetTest, ResetsToVacuumAndDecouples) {
    auto s = tms(0.8);
    std::vector<ModeId> block{ModeId::A_H};
    auto b = reset_to_vacuum(s, block);
    EXPECT_NEAR(b.cov()(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(b.cov()(0, 2), 0.0, 1e-15);
    EXPECT_NEAR(b.cov()(2, 2), std::cosh(1.6), 1e-14);
}

TEST(SamplerTest, DuplicateModeRejectedWithCommutatorMessage) {
    auto s = tms(0.5);
    std::vector<QuadratureRequest> req{make_request(ModeId::A_H, 0), make_request(ModeId::A_H, pi / 2)};
    try {
        QuadratureSampler sampler(s, req);
        FAIL() << "expected rejection";
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find("commute"), std::string::npos);
    }
}

TEST(SamplerTest, PhaseWraps) {
    auto r = make_request(ModeId::A_H, -pi / 2);
    EXPECT_NEAR(r.phase, 3 * pi / 2, 1e-15);
    EXPECT_NEAR(make_request(ModeId::A_H, 2 * pi).phase, 0.0, 1e-15);
}

TEST(SamplerTest, EmpiricalMomentsMatchAnalytic) {
    // Randomized grid of states, modes and phases; second moments at 1e6
    // samples within 5 standard errors.
    SplitMix64 grid_rng(11);
    for (int trial = 0; trial < 4; ++trial) {
        double r = 0.2 + 0.8 * uniform_unit(grid_rng);
        double theta = 2 * pi * uniform_unit(grid_rng);
        auto vac = vacuum_state({ModeId::A_H, ModeId::A_V, ModeId::B_H, ModeId::B_V});
        auto s = two_mode_squeeze(vac, ModeId::A_H, ModeId::B_H, r);
        s = two_mode_squeeze(s, ModeId::A_V, ModeId::B_V, r);
        s = polarization_rotation(s, ModeId::A_H, ModeId::A_V, theta);
        std::vector<QuadratureRequest> req{
            make_request(ModeId::A_H, 2 * pi * uniform_unit(grid_rng)),
            make_request(ModeId::B_H, 2 * pi * uniform_unit(grid_rng)),
            make_request(ModeId::A_V, 2 * pi * uniform_unit(grid_rng))};
        QuadratureSampler sampler(s, req);
        constexpr size_t n = 1'000'000;
        SplitMix64 rng(100 + trial);
        std::vector<double> buf(3);
        double sum[3][3] = {}, sum2[3][3] = {};
        for (size_t k = 0; k < n; ++k) {
            sampler.sample_into(rng, buf);
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    double p = buf[i] * buf[j];
                    sum[i][j] += p;
                    sum2[i][j] += p * p;
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                double mean = sum[i][j] / n;
                double var = sum2[i][j] / n - mean * mean;
                double se = std::sqrt(var / n);
                std::vector<QuadratureRequest> f{req[i], req[j]};
                EXPECT_NEAR(mean, analytic_moment(s, f), 5 * se) << "trial " << trial << " pair " << i << j;
            }
        }
    }
}

TEST(SamplerTest, DeterministicForSeed) {
    auto s = tms(0.5);
    std::vector<QuadratureRequest> req{make_request(ModeId::A_H, 0), make_request(ModeId::B_H, 0)};
    SplitMix64 r1(5), r2(5);
    EXPECT_EQ(joint_quadrature_sample(s, req, r1), joint_quadrature_sample(s, req, r2));
}

TEST(AnalyticMomentTest, TwoModeSqueezedValues) {
    auto s = tms(0.5);
    auto x1a = make_request(ModeId::A_H, 0), x1b = make_request(ModeId::B_H, 0);
    auto x2a = make_request(ModeId::A_H, pi / 2), x2b = make_request(ModeId::B_H, pi / 2);
    std::vector<QuadratureRequest> f4{x1a, x1a, x1b, x1b};
    EXPECT_NEAR(analytic_moment(s, f4), 5.14329, 1e-5);
    std::vector<QuadratureRequest> f2{x2a, x2b};
    EXPECT_NEAR(analytic_moment(s, f2), -std::sinh(1.0), 1e-14);
    std::vector<QuadratureRequest> f3{x1a, x1a, x1b};
    EXPECT_EQ(analytic_moment(s, f3), 0.0);
    std::vector<QuadratureRequest> f0{};
    EXPECT_EQ(analytic_moment(s, f0), 1.0);
}

TEST(AnalyticMomentTest, MoreThanFourFactorsRejected) {
    auto s = tms(0.5);
    std::vector<QuadratureRequest> f(5, make_request(ModeId::A_H, 0));
    EXPECT_THROW(analytic_moment(s, f), std::invalid_argument);
}

TEST(AnalyticMomentTest, AgreesWithFockForRotatedState) {
    double r = 0.5;
    double theta = 0.4;
    auto g = polarization_rotation(
        two_mode_squeeze(
            vacuum_state({ModeId::A_H, ModeId::A_V, ModeId::B_H}), ModeId::A_H, ModeId::B_H, r),
        ModeId::A_H, ModeId::A_V, theta);
    // Same state in Fock space: rotate the A_H quadrature instead of the state.
    auto space = fock::build_space({ModeId::A_H, ModeId::B_H}, 14);
    auto psi = fock::embed(fock::two_mode_squeezed_vector(space, ModeId::A_H, ModeId::B_H, r), 16);
    // A_H(out) = cos(theta) A_H(in) + sin(theta) A_V(in), A_V(in) is vacuum.
    // <X_out^2 X_B^2> = cos^2 <X_A^2 X_B^2> + sin^2 <X_B^2>.
    fock::LinearCombination xa{{ModeId::A_H, fock::OperatorKind::x1, 1.0}};
    fock::LinearCombination xb{{ModeId::B_H, fock::OperatorKind::x1, 1.0}};
    std::vector<fock::LinearCombination> f4{xa, xa, xb, xb};
    std::vector<fock::LinearCombination> f2{xb, xb};
    double c2 = std::cos(theta) * std::cos(theta);
    double fock_value =
        c2 * fock::product_expectation(psi, f4).real() + (1 - c2) * fock::product_expectation(psi, f2).real();
    auto qa = make_request(ModeId::A_H, 0), qb = make_request(ModeId::B_H, 0);
    std::vector<QuadratureRequest> fg{qa, qa, qb, qb};
    EXPECT_NEAR(analytic_moment(g, fg), fock_value, 1e-4);
}

TEST(PhotonNumberTest, ThermalMarginal) {
    auto s = tms(0.3);
    auto p = photon_number_distribution(s, ModeId::A_H);
    double nbar = std::sinh(0.3) * std::sinh(0.3);
    EXPECT_NEAR(p[0], 1 / (1 + nbar), 1e-12);
    EXPECT_NEAR(photon_number_distribution(tms(0.5), ModeId::B_H)[0], 0.7865, 1e-4);
    double ratio = nbar / (1 + nbar);
    EXPECT_NEAR(p[3], p[0] * ratio * ratio * ratio, 1e-12);
    double mean = 0;
    for (size_t n = 0; n < p.size(); ++n) mean += n * p[n];
    EXPECT_NEAR(mean, nbar, 1e-7);
}

TEST(PhotonNumberTest, VacuumIsDelta) {
    auto vac = vacuum_state({ModeId::V_A});
    auto p = photon_number_distribution(vac, ModeId::V_A);
    ASSERT_FALSE(p.empty());
    EXPECT_EQ(p[0], 1.0);
    PhotonCounter counter(vac, ModeId::V_A);
    SplitMix64 rng(3);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(counter.sample(rng), 0u);
}

TEST(PhotonNumberTest, SingleModeSqueezed) {
    double r = 0.5;
    Eigen::MatrixXd cov(2, 2);
    cov << std::exp(-2 * r), 0, 0, std::exp(2 * r);
    GaussianState s({ModeId::A_H}, Eigen::VectorXd::Zero(2), cov);
    auto p = photon_number_distribution(s, ModeId::A_H);
    EXPECT_NEAR(p[0], 1 / std::cosh(r), 1e-8);
    EXPECT_NEAR(p[0], 0.8868, 1e-4);
    EXPECT_NEAR(p[1], 0.0, 1e-12);
    EXPECT_NEAR(p[2], 0.0947, 1e-4);
}

TEST(PhotonNumberTest, CounterMatchesDistribution) {
    auto s = tms(0.5);
    PhotonCounter counter(s, ModeId::A_H);
    SplitMix64 rng(9);
    constexpr size_t n = 200'000;
    double sum = 0;
    for (size_t i = 0; i < n; ++i) sum += double(counter.sample(rng));
    double nbar = std::sinh(0.5) * std::sinh(0.5);
    double sd = std::sqrt(nbar * (1 + nbar));
    EXPECT_NEAR(sum / n, nbar, 5 * sd / std::sqrt(double(n)));
}

}  // namespace
}  // namespace cvbell::gaussian
