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


#include "cvbell/protocol.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace cvbell::protocol {
namespace {

using std::numbers::pi;

ExperimentConfig small_config(double r, uint64_t trials, ModelSelection model = ModelSelection::both) {
    ExperimentConfig c;
    c.squeezing = r;
    c.n_trials = trials;
    c.model = model;
    return c;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

// Critical value at significance 1e-3.
double ks_critical(size_t n, size_t m) {
    return 1.949 * std::sqrt(double(n + m) / (double(n) * double(m)));
}

TEST(ConfigTest, DefaultsAreValid) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.squeezing, 0.5);
    EXPECT_EQ(c.n_trials, 1'000'000u);
    EXPECT_EQ(c.truncation, 12u);
    EXPECT_EQ(c.aux_probability, 0.1);
    EXPECT_EQ(c.model, ModelSelection::both);
}

void expect_field(const ExperimentConfig &c, const std::string &field) {
    try {
        c.validate();
        FAIL() << "expected ConfigError for " << field;
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.field(), field);
        EXPECT_NE(std::string(e.what()).find(field), std::string::npos);
    }
}

TEST(ConfigTest, ErrorsNameTheField) {
    ExperimentConfig c;
    c.squeezing = -1;
    expect_field(c, "squeezing");
    c = {};
    c.squeezing = std::nan("");
    expect_field(c, "squeezing");
    c = {};
    c.n_trials = 0;
    expect_field(c, "trials");
    c = {};
    c.aux_probability = 1;
    expect_field(c, "aux_probability");
    c = {};
    c.calibration_probability = -0.1;
    expect_field(c, "calibration_probability");
    c = {};
    c.aux_probability = 0.5;
    c.calibration_probability = 0.5;
    expect_field(c, "calibration_probability");
    c = {};
    c.angles_a.clear();
    expect_field(c, "angles_a");
    c = {};
    c.angles_b = {0.1, 0.1};
    expect_field(c, "angles_b");
    c = {};
    c.truncation = 20;
    expect_field(c, "truncation");
}

TEST(ModelTest, Names) {
    EXPECT_EQ(model_from_name("lhv"), Model::lhv);
    EXPECT_EQ(model_name(Model::quantum), "quantum");
    EXPECT_EQ(model_selection_from_name("both"), ModelSelection::both);
    EXPECT_THROW(model_selection_from_name("classical"), ConfigError);
    EXPECT_EQ(selected_models(ModelSelection::both).size(), 2u);
}

TEST(SettingTest, EncodeDecodeRoundTrip) {
    ExperimentConfig c;
    for (Station st : {Station::A, Station::B}) {
        auto settings = station_settings(c, st);
        EXPECT_EQ(settings.size(), 4 * c.angles(st).size() + 3);
        for (size_t i = 0; i < settings.size(); ++i) {
            auto text = settings[i].encode();
            EXPECT_EQ(MeasurementSetting::decode(text), settings[i]) << text;
            EXPECT_EQ(setting_index(c, settings[i]), i);
        }
    }
    MeasurementSetting q{Station::A, QuadratureSetting{pi / 4, Output::parallel, 1}};
    EXPECT_EQ(q.encode(), "A:quad:0.78539816339744828:par:1");
    EXPECT_EQ((MeasurementSetting{Station::B, VacuumQuadratureSetting{2}}).encode(), "B:vac:-:-:2");
    EXPECT_EQ((MeasurementSetting{Station::A, AuxIntensitySetting{}}).encode(), "A:aux:-:-:-");
}

TEST(SettingTest, MalformedRejected) {
    EXPECT_THROW(MeasurementSetting::decode("C:aux:-:-:-"), std::invalid_argument);
    EXPECT_THROW(MeasurementSetting::decode("A:quad:0:par:3"), std::invalid_argument);
    EXPECT_THROW(MeasurementSetting::decode("A:quad:0:sideways:1"), std::invalid_argument);
    EXPECT_THROW(MeasurementSetting::decode("A:quad:0:par"), std::invalid_argument);
    EXPECT_THROW(MeasurementSetting::decode("A:quad:zero:par:1"), std::invalid_argument);
}

TEST(SettingTest, QuadPhase) {
    EXPECT_EQ((QuadratureSetting{0.1, Output::parallel, 1}).phase(), 0.0);
    EXPECT_EQ((QuadratureSetting{0.1, Output::parallel, 2}).phase(), pi / 2);
}

TEST(PrepareStateTest, ZeroSqueezingIsVacuum) {
    auto s = prepare_state(small_config(0, 1));
    EXPECT_EQ(s.mode_count(), 6u);
    EXPECT_TRUE(s.cov().isIdentity(1e-15));
}

TEST(PrepareStateTest, CorrelationStructure) {
    auto s = prepare_state(small_config(0.5, 1));
    auto ah = gaussian::make_request(ModeId::A_H, 0);
    auto bh = gaussian::make_request(ModeId::B_H, 0);
    auto bv = gaussian::make_request(ModeId::B_V, 0);
    std::vector<gaussian::QuadratureRequest> f1{ah, bh}, f2{ah, bv};
    EXPECT_NEAR(gaussian::analytic_moment(s, f1), 1.17520, 1e-5);
    EXPECT_EQ(gaussian::analytic_moment(s, f2), 0.0);
    auto va = s.offset(ModeId::V_A);
    EXPECT_TRUE(s.cov().block(va, va, 2, 2).isIdentity(0));
    EXPECT_EQ(s.cov().row(va).cwiseAbs().sum(), 1.0);
}

TEST(BlockedStateTest, Examples) {
    auto s = prepare_state(small_config(0.5, 1));
    auto blocked = blocked_station_state(s, Station::A);
    auto ah = gaussian::make_request(ModeId::A_H, 0);
    auto bh = gaussian::make_request(ModeId::B_H, 0);
    std::vector<gaussian::QuadratureRequest> f{ah, bh};
    EXPECT_EQ(gaussian::analytic_moment(blocked, f), 0.0);
    std::vector<gaussian::QuadratureRequest> fb{bh, bh};
    EXPECT_NEAR(gaussian::analytic_moment(blocked, fb), std::cosh(1.0), 1e-14);

    auto vac = prepare_state(small_config(0, 1));
    EXPECT_EQ(blocked_station_state(vac, Station::A).cov(), vac.cov());
    auto both = blocked_station_state(blocked, Station::B);
    EXPECT_TRUE(both.cov().isIdentity(0));
}

TEST(ScheduleTest, PureFunctionOfSeedAndTrial) {
    auto c = small_config(0.5, 1000);
    auto s1 = schedule_trial(c, 417);
    auto s2 = schedule_trial(c, 417);
    EXPECT_EQ(s1.a, s2.a);
    EXPECT_EQ(s1.b, s2.b);
    auto full = build_schedule(c);
    ASSERT_EQ(full.size(), 1000u);
    EXPECT_EQ(full[417].a, s1.a);
    c.seed += 1;
    size_t same = 0;
    auto other = build_schedule(c);
    for (size_t i = 0; i < full.size(); ++i) same += full[i].a == other[i].a;
    EXPECT_LT(same, 300u);
}

TEST(ScheduleTest, NoAuxWhenProbabilityZero) {
    auto c = small_config(0.5, 10'000);
    c.aux_probability = 0;
    for (const auto &p : build_schedule(c)) {
        EXPECT_FALSE(p.a.is_aux());
        EXPECT_FALSE(p.b.is_aux());
    }
}

TEST(ScheduleTest, AuxFrequency) {
    auto c = small_config(0.5, 100'000);
    c.aux_probability = 0.2;
    size_t aux_a = 0, aux_b = 0;
    for (const auto &p : build_schedule(c)) {
        aux_a += p.a.is_aux();
        aux_b += p.b.is_aux();
    }
    EXPECT_NEAR(aux_a / 1e5, 0.2, 0.004);
    EXPECT_NEAR(aux_b / 1e5, 0.2, 0.004);
}

TEST(ScheduleTest, SettingsAreIndependentAcrossStations) {
    auto c = small_config(0.5, 200'000);
    auto sa = station_settings(c, Station::A);
    auto sb = station_settings(c, Station::B);
    std::vector<size_t> count_a(sa.size()), count_b(sb.size());
    std::vector<std::vector<size_t>> joint(sa.size(), std::vector<size_t>(sb.size()));
    for (const auto &p : build_schedule(c)) {
        size_t i = setting_index(c, p.a), j = setting_index(c, p.b);
        ++count_a[i];
        ++count_b[j];
        ++joint[i][j];
    }
    double n = double(c.n_trials);
    for (size_t i = 0; i < sa.size(); ++i) {
        for (size_t j = 0; j < sb.size(); ++j) {
            double expected = count_a[i] * double(count_b[j]) / n;
            EXPECT_LT(std::abs(joint[i][j] - expected), 5 * std::sqrt(expected)) << i << "," << j;
        }
    }
    // Quadrature settings are uniform within the non-aux, non-calibration mass.
    double quad_share = (1 - c.aux_probability - c.calibration_probability) / (4 * c.angles_a.size());
    for (size_t i = 0; i < 4 * c.angles_a.size(); ++i) {
        double sd = std::sqrt(n * quad_share * (1 - quad_share));
        EXPECT_LT(std::abs(count_a[i] - n * quad_share), 5 * sd);
    }
}

TEST(RunExperimentTest, VacuumQuadratureVariance) {
    auto c = small_config(0, 10'000, ModelSelection::quantum);
    auto rs = run_experiment(c, Model::quantum);
    for (Station st : {Station::A, Station::B}) {
        double sum = 0, sum2 = 0;
        size_t n = 0;
        for (const auto &r : rs.records) {
            if (r.setting(st).is_aux()) continue;
            sum += r.outcome(st);
            sum2 += r.outcome(st) * r.outcome(st);
            ++n;
        }
        double mean = sum / n;
        EXPECT_NEAR(sum2 / n - mean * mean, 1.0, 0.03);
    }
}

TEST(RunExperimentTest, QuantumAuxIsExactlyZeroLhvIsNot) {
    auto c = small_config(0.5, 60'000);
    auto q = run_experiment(c, Model::quantum);
    auto l = run_experiment(c, Model::lhv);
    size_t aux = 0;
    double lhv_sum = 0;
    size_t lhv_aux = 0;
    for (const auto &r : q.records) {
        EXPECT_FALSE(r.lhv.has_value());
        for (Station st : {Station::A, Station::B}) {
            if (r.setting(st).is_aux()) {
                ++aux;
                EXPECT_EQ(r.outcome(st), 0.0);
            }
        }
    }
    for (const auto &r : l.records) {
        ASSERT_TRUE(r.lhv.has_value());
        EXPECT_EQ(r.lhv->count_rate_a.has_value(), r.setting_a.is_quadrature());
        EXPECT_EQ(r.lhv->count_rate_b.has_value(), r.setting_b.is_quadrature());
        for (Station st : {Station::A, Station::B}) {
            if (r.setting(st).is_aux()) {
                ++lhv_aux;
                lhv_sum += r.outcome(st);
            }
        }
    }
    EXPECT_GT(aux, 5000u);
    ASSERT_GE(lhv_aux, 10'000u);
    EXPECT_NEAR(lhv_sum / lhv_aux, 0.5, 0.02);
}

TEST(RunExperimentTest, RecordsSortedAndComplete) {
    auto c = small_config(0.3, 2000);
    auto rs = run_experiment(c, Model::lhv, 3);
    ASSERT_EQ(rs.records.size(), 2000u);
    for (size_t i = 0; i < rs.records.size(); ++i) {
        EXPECT_EQ(rs.records[i].trial_id, i);
        EXPECT_TRUE(std::isfinite(rs.records[i].outcome_a));
    }
    EXPECT_EQ(rs.master_seed, c.seed);
    EXPECT_EQ(rs.stream_scheme, STREAM_SCHEME);
}

TEST(RunExperimentTest, SerialEqualsParallel) {
    auto c = small_config(0.5, 20'000);
    for (Model m : {Model::quantum, Model::lhv}) {
        auto serial = run_experiment(c, m, 1);
        auto parallel = run_experiment(c, m, 7);
        EXPECT_TRUE(serial.records == parallel.records);
    }
}

TEST(RunExperimentTest, InvalidConfigRejected) {
    auto c = small_config(0.5, 0);
    EXPECT_THROW(run_experiment(c, Model::quantum), ConfigError);
}

class NoSignalingTest : public ::testing::TestWithParam<Model> {};

TEST_P(NoSignalingTest, StationAMarginalIgnoresStationBSetting) {
    auto c = small_config(0.5, 100'000);
    auto rs = run_experiment(c, GetParam());
    auto sa = station_settings(c, Station::A);
    auto sb = station_settings(c, Station::B);
    // For each A setting, compare A outcomes under every B setting against
    // the pooled remainder.
    for (size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].is_aux() && GetParam() == Model::quantum) continue;
        std::map<size_t, std::vector<double>> by_b;
        for (const auto &r : rs.records) {
            if (setting_index(c, r.setting_a) == i) by_b[setting_index(c, r.setting_b)].push_back(r.outcome_a);
        }
        for (const auto &[j, group] : by_b) {
            std::vector<double> rest;
            for (const auto &[k, other] : by_b) {
                if (k != j) rest.insert(rest.end(), other.begin(), other.end());
            }
            EXPECT_LT(ks_statistic(group, rest), ks_critical(group.size(), rest.size()))
                << sa[i].encode() << " | " << sb[j].encode();
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Models, NoSignalingTest, ::testing::Values(Model::quantum, Model::lhv),
                         [](const auto &info) { return std::string(model_name(info.param)); });

TEST(ThreadsTest, EnvironmentCap) {
    ::setenv("CVBELL_THREADS", "1", 1);
    EXPECT_EQ(worker_threads_from_env(), 1u);
    ::setenv("CVBELL_THREADS", "zero", 1);
    EXPECT_THROW(worker_threads_from_env(), ConfigError);
    ::setenv("CVBELL_THREADS", "0", 1);
    EXPECT_THROW(worker_threads_from_env(), ConfigError);
    ::unsetenv("CVBELL_THREADS");
    EXPECT_GE(worker_threads_from_env(), 1u);
}

}  // namespace
}  // namespace cvbell::protocol
