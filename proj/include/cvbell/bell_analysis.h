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

#ifndef _CVBELL_BELL_ANALYSIS_H
#define _CVBELL_BELL_ANALYSIS_H

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvbell/protocol.h"

namespace cvbell::bell {

using protocol::Output;
using protocol::RecordSet;

/// Subensembles smaller than this are not turned into estimates.
inline constexpr size_t MIN_SUBENSEMBLE = 30;

struct StarvedSubensembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Zero or negative denominator: no photons, so no correlation is defined.
struct DegenerateCorrelationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when records hold no auxiliary intensity trials for a station, so
/// positivity of the individual count rates cannot be certified.
struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

struct SampleStatistic {
    size_t count = 0;
    double mean = 0;
    double variance = 0;  // unbiased sample variance
    double standard_error() const {
        return count > 1 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
    }
};

SampleStatistic summarize(std::span<const double> values);

/// <x^2> over trials whose `setting.station` setting equals `setting`
/// (quadrature or vacuum-quadrature settings only).
SampleStatistic station_square_moment(const RecordSet &records, const protocol::MeasurementSetting &setting);

/// <x_A^2 x_B^2> over trials with exactly this pair of quadrature settings.
SampleStatistic pair_square_moment(
    const RecordSet &records, const protocol::QuadratureSetting &a, const protocol::QuadratureSetting &b);

/// Vacuum-referenced count rate <R> = (<X_1^2> + <X_2^2> - <X_v1^2> - <X_v2^2>) / 4,
/// each term taken from its own subensemble.
struct CountRateEstimate {
    Station station;
    double theta;
    Output output;
    double mean;
    double standard_error;
    std::array<size_t, 2> signal_counts;  // quad 1, quad 2
    std::array<size_t, 2> vacuum_counts;  // quad 1, quad 2
};

CountRateEstimate estimate_count_rate(const RecordSet &records, Station station, double theta, Output output);

/// Moments entering the intensity-difference correlation at one angle pair.
/// Indices: [output][quad - 1], output 0 = parallel, 1 = perpendicular.
struct CorrelationTerms {
    // fourth[ka][qa][kb][qb] = <X_{A,ka,qa}^2 X_{B,kb,qb}^2>
    double fourth[2][2][2][2];
    double second_a[2][2];
    double second_b[2][2];
    double vacuum_a[2];
    double vacuum_b[2];

    /// <(R_A par - R_A perp)(R_B par - R_B perp)>
    double numerator() const;
    /// <(R_A par + R_A perp)(R_B par + R_B perp)>, vacuum terms factorized.
    double denominator() const;
};

/// E = <(R_A par - R_A perp)(R_B par - R_B perp)> / <(R_A par + R_A perp)(R_B par + R_B perp)>.
struct CorrelationEstimate {
    double theta_a;
    double theta_b;
    double e;
    double standard_error;
    double numerator;
    double denominator;
    /// |E| <= 1 + 3 stderr.
    bool plausible() const {
        return std::abs(e) <= 1 + 3 * standard_error;
    }
};

/// Monte Carlo estimate with delta-method standard error. The second moments
/// are taken from trials outside the 16 joint subensembles so that every input
/// estimate comes from a disjoint (hence independent) set of trials.
CorrelationEstimate estimate_correlation(const RecordSet &records, double theta_a, double theta_b);

/// Exact moments of the prepared state (Isserlis), combined exactly as in
/// estimate_correlation. Throws DegenerateCorrelationError at r = 0.
CorrelationTerms oracle_terms(const protocol::ExperimentConfig &config, double theta_a, double theta_b);
double oracle_correlation(const protocol::ExperimentConfig &config, double theta_a, double theta_b);

/// Same E evaluated in a truncated Fock space from photon-number operators of
/// the rotated outputs, with no quadrature expansion. Throws fock::TruncationError
/// when config.truncation is too small for the squeezing.
double fock_correlation(const protocol::ExperimentConfig &config, double theta_a, double theta_b);

struct ChshResult {
    double s;
    double standard_error;
};

/// S = |E11 - E12 + E21 + E22|; standard errors added in quadrature.
ChshResult chsh(double e11, double e12, double e21, double e22, double se11 = 0, double se12 = 0, double se21 = 0,
                double se22 = 0);
ChshResult chsh(const std::array<CorrelationEstimate, 4> &e);

struct StationAudit {
    size_t trials;
    double negative_fraction;
    double min_count_rate;
    double mean_count_rate;
    double mean_standard_error;
    /// mean >= -3 stderr
    bool ensemble_nonnegative() const {
        return mean_count_rate >= -3 * mean_standard_error;
    }
};

struct PositivityAudit {
    StationAudit a;
    StationAudit b;
};

/// Statistics of the hidden-variable individual count rates. Throws
/// std::invalid_argument on quantum records, which have no individuals.
PositivityAudit positivity_audit(const RecordSet &records);

struct VacuumCheck {
    size_t aux_trials_a;
    size_t aux_trials_b;
    size_t nonzero_outcomes;
    bool all_zero;
    double mean_intensity;
    double mean_intensity_standard_error;
    /// 1-based count of aux outcomes (A before B within a trial) up to and
    /// including the first nonzero one.
    std::optional<size_t> aux_outcomes_until_nonzero;
};

/// Throws CertificationError when a station has no aux trials.
VacuumCheck vacuum_check(const RecordSet &records);

struct OracleSummary {
    std::vector<std::array<double, 3>> correlations;  // theta_a, theta_b, E
    std::optional<double> s;
    std::optional<double> fock_s;
    std::string fock_note;
    std::string error;
};

OracleSummary oracle_summary(const protocol::ExperimentConfig &config);

struct BellReport {
    protocol::Model model;
    std::vector<CorrelationEstimate> correlations;  // angles_a-major
    std::optional<ChshResult> chsh;
    std::vector<CountRateEstimate> count_rates;
    std::optional<PositivityAudit> positivity;
    std::optional<VacuumCheck> vacuum;
    std::string vacuum_error;
};

/// Full analysis of one record set. Starved subensembles propagate as errors.
BellReport analyze(const RecordSet &records);

nlohmann::ordered_json report_to_json(
    const protocol::ExperimentConfig &config, const OracleSummary &oracle, std::span<const BellReport> reports);

/// Columns: model,theta_a,theta_b,E,stderr,E_oracle
void write_correlation_table(
    const OracleSummary &oracle, std::span<const BellReport> reports, std::ostream &out);

}  // namespace cvbell::bell

#endif
