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

#include "cvbell/bell_analysis.h"

#include <algorithm>
#include <limits>
#include <ostream>

#include "cvbell/fock_core.h"
#include "cvbell/gaussian_engine.h"
#include "cvbell/number_format.h"
#include "cvbell/records_io.h"

namespace cvbell::bell {

using protocol::MeasurementSetting;
using protocol::QuadratureSetting;
using protocol::VacuumQuadratureSetting;

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double total = 0;
        for (double v : values) {
            total += v;
        }
        return total;
    }
    size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleStatistic summarize(std::span<const double> values) {
    SampleStatistic out;
    out.count = values.size();
    if (values.empty()) {
        return out;
    }
    out.mean = pairwise_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (size_t k = 0; k < values.size(); k++) {
            double d = values[k] - out.mean;
            sq[k] = d * d;
        }
        out.variance = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    }
    return out;
}

namespace {

int output_index(Output output) {
    return output == Output::parallel ? 0 : 1;
}

Output output_from_index(int k) {
    return k == 0 ? Output::parallel : Output::perpendicular;
}

void require_angle(const protocol::ExperimentConfig &config, Station station, double theta) {
    const auto &angles = config.angles(station);
    if (std::find(angles.begin(), angles.end(), theta) == angles.end()) {
        throw std::invalid_argument(
            std::string("Angle ") + format_double(theta) + " is not configured for station " +
            station_letter(station) + ".");
    }
}

const SampleStatistic &require_size(const SampleStatistic &s, const std::string &name) {
    if (s.count < MIN_SUBENSEMBLE) {
        throw StarvedSubensembleError(
            "Subensemble " + name + " has " + std::to_string(s.count) + " trials; at least " +
            std::to_string(MIN_SUBENSEMBLE) + " are required.");
    }
    return s;
}

std::string quad_name(Station station, double theta, int k, int q) {
    return MeasurementSetting{station, QuadratureSetting{theta, output_from_index(k), q + 1}}.encode();
}

std::string vac_name(Station station, int q) {
    return MeasurementSetting{station, VacuumQuadratureSetting{q + 1}}.encode();
}

}  // namespace

SampleStatistic station_square_moment(const RecordSet &records, const MeasurementSetting &setting) {
    if (setting.is_aux()) {
        throw std::invalid_argument("station_square_moment needs a quadrature setting.");
    }
    std::vector<double> values;
    for (const auto &r : records.records) {
        if (r.setting(setting.station) == setting) {
            double x = r.outcome(setting.station);
            values.push_back(x * x);
        }
    }
    return summarize(values);
}

SampleStatistic pair_square_moment(const RecordSet &records, const QuadratureSetting &a, const QuadratureSetting &b) {
    MeasurementSetting sa{Station::A, a};
    MeasurementSetting sb{Station::B, b};
    std::vector<double> values;
    for (const auto &r : records.records) {
        if (r.setting_a == sa && r.setting_b == sb) {
            values.push_back(r.outcome_a * r.outcome_a * r.outcome_b * r.outcome_b);
        }
    }
    return summarize(values);
}

CountRateEstimate estimate_count_rate(const RecordSet &records, Station station, double theta, Output output) {
    require_angle(records.config, station, theta);
    std::array<SampleStatistic, 4> parts;
    for (int q = 0; q < 2; q++) {
        MeasurementSetting signal{station, QuadratureSetting{theta, output, q + 1}};
        MeasurementSetting vacuum{station, VacuumQuadratureSetting{q + 1}};
        parts[static_cast<size_t>(q)] = require_size(station_square_moment(records, signal), signal.encode());
        parts[static_cast<size_t>(q) + 2] = require_size(station_square_moment(records, vacuum), vacuum.encode());
    }
    double mean = (parts[0].mean + parts[1].mean - parts[2].mean - parts[3].mean) / 4;
    double var = 0;
    for (const auto &p : parts) {
        var += p.standard_error() * p.standard_error();
    }
    return CountRateEstimate{
        station,      theta, output, mean, std::sqrt(var) / 4, {parts[0].count, parts[1].count},
        {parts[2].count, parts[3].count}};
}

double CorrelationTerms::numerator() const {
    double total = 0;
    for (int ka = 0; ka < 2; ka++) {
        for (int qa = 0; qa < 2; qa++) {
            for (int kb = 0; kb < 2; kb++) {
                for (int qb = 0; qb < 2; qb++) {
                    double sign = (ka == kb) ? 1.0 : -1.0;
                    total += sign * fourth[ka][qa][kb][qb];
                }
            }
        }
    }
    return total / 16;
}

namespace {

struct Aggregates {
    double joint;     // sum of fourth / 16
    double signal_a;  // sum of second_a / 4
    double signal_b;
    double vacuum_a;  // sum of vacuum_a / 4
    double vacuum_b;
};

Aggregates aggregates(const CorrelationTerms &t) {
    Aggregates g{0, 0, 0, 0, 0};
    for (int ka = 0; ka < 2; ka++) {
        for (int qa = 0; qa < 2; qa++) {
            g.signal_a += t.second_a[ka][qa] / 4;
            g.signal_b += t.second_b[ka][qa] / 4;
            for (int kb = 0; kb < 2; kb++) {
                for (int qb = 0; qb < 2; qb++) {
                    g.joint += t.fourth[ka][qa][kb][qb] / 16;
                }
            }
        }
        g.vacuum_a += t.vacuum_a[ka] / 4;
        g.vacuum_b += t.vacuum_b[ka] / 4;
    }
    return g;
}

}  // namespace

double CorrelationTerms::denominator() const {
    // Each station's summed count rate is S/4 - 2 V/4 with S the four signal
    // quadrature squares and V the two vacuum quadrature squares. The vacuum
    // modes are independent of everything else, so their cross terms factorize.
    auto g = aggregates(*this);
    return g.joint - 2 * g.signal_a * g.vacuum_b - 2 * g.vacuum_a * g.signal_b + 4 * g.vacuum_a * g.vacuum_b;
}

CorrelationEstimate estimate_correlation(const RecordSet &records, double theta_a, double theta_b) {
    require_angle(records.config, Station::A, theta_a);
    require_angle(records.config, Station::B, theta_b);

    std::vector<double> fourth[2][2][2][2];
    std::vector<double> second_a[2][2];
    std::vector<double> second_b[2][2];
    std::vector<double> vacuum_a[2];
    std::vector<double> vacuum_b[2];

    auto at_angle = [](const MeasurementSetting &s, double theta) -> const QuadratureSetting * {
        const auto *q = std::get_if<QuadratureSetting>(&s.variant);
        return (q != nullptr && q->theta == theta) ? q : nullptr;
    };
    for (const auto &r : records.records) {
        const auto *qa = at_angle(r.setting_a, theta_a);
        const auto *qb = at_angle(r.setting_b, theta_b);
        double xa2 = r.outcome_a * r.outcome_a;
        double xb2 = r.outcome_b * r.outcome_b;
        if (qa && qb) {
            fourth[output_index(qa->output)][qa->quad - 1][output_index(qb->output)][qb->quad - 1].push_back(xa2 * xb2);
        } else if (qa) {
            second_a[output_index(qa->output)][qa->quad - 1].push_back(xa2);
        } else if (qb) {
            second_b[output_index(qb->output)][qb->quad - 1].push_back(xb2);
        }
        if (const auto *v = std::get_if<VacuumQuadratureSetting>(&r.setting_a.variant)) {
            vacuum_a[v->quad - 1].push_back(xa2);
        }
        if (const auto *v = std::get_if<VacuumQuadratureSetting>(&r.setting_b.variant)) {
            vacuum_b[v->quad - 1].push_back(xb2);
        }
    }

    // Every input is a mean over a disjoint set of i.i.d. trials (or over
    // independent vacuum modes), so the delta method needs only the variances.
    CorrelationTerms terms{};
    std::vector<std::pair<double *, SampleStatistic>> inputs;
    for (int ka = 0; ka < 2; ka++) {
        for (int qa = 0; qa < 2; qa++) {
            for (int kb = 0; kb < 2; kb++) {
                for (int qb = 0; qb < 2; qb++) {
                    auto s = require_size(
                        summarize(fourth[ka][qa][kb][qb]),
                        quad_name(Station::A, theta_a, ka, qa) + " x " + quad_name(Station::B, theta_b, kb, qb));
                    terms.fourth[ka][qa][kb][qb] = s.mean;
                    inputs.emplace_back(&terms.fourth[ka][qa][kb][qb], s);
                }
            }
            auto sa = require_size(
                summarize(second_a[ka][qa]), quad_name(Station::A, theta_a, ka, qa) + " (marginal)");
            terms.second_a[ka][qa] = sa.mean;
            inputs.emplace_back(&terms.second_a[ka][qa], sa);
            auto sb = require_size(
                summarize(second_b[ka][qa]), quad_name(Station::B, theta_b, ka, qa) + " (marginal)");
            terms.second_b[ka][qa] = sb.mean;
            inputs.emplace_back(&terms.second_b[ka][qa], sb);
        }
        auto va = require_size(summarize(vacuum_a[ka]), vac_name(Station::A, ka));
        terms.vacuum_a[ka] = va.mean;
        inputs.emplace_back(&terms.vacuum_a[ka], va);
        auto vb = require_size(summarize(vacuum_b[ka]), vac_name(Station::B, ka));
        terms.vacuum_b[ka] = vb.mean;
        inputs.emplace_back(&terms.vacuum_b[ka], vb);
    }

    double num = terms.numerator();
    double den = terms.denominator();
    if (!(den > 0)) {
        throw DegenerateCorrelationError(
            "Non-positive denominator estimate " + format_double(den) + " at theta_a=" + format_double(theta_a) +
            ", theta_b=" + format_double(theta_b) + "; more trials are needed.");
    }
    double e = num / den;

    // N and D are each of degree one in every input, so central differences give
    // their partial derivatives exactly (up to rounding); dE = (dN - E dD) / D.
    double var = 0;
    for (auto &[slot, stat] : inputs) {
        double original = *slot;
        double h = 1e-3 * std::max(1.0, std::abs(original));
        *slot = original + h;
        double num_up = terms.numerator();
        double den_up = terms.denominator();
        *slot = original - h;
        double num_down = terms.numerator();
        double den_down = terms.denominator();
        *slot = original;
        double d_num = (num_up - num_down) / (2 * h);
        double d_den = (den_up - den_down) / (2 * h);
        double grad = (d_num - e * d_den) / den;
        double se = stat.standard_error();
        var += grad * grad * se * se;
    }
    return CorrelationEstimate{theta_a, theta_b, e, std::sqrt(var), num, den};
}

CorrelationTerms oracle_terms(const protocol::ExperimentConfig &config, double theta_a, double theta_b) {
    auto state = protocol::prepare_state(config);
    auto ma = station_modes(Station::A);
    auto mb = station_modes(Station::B);
    state = gaussian::polarization_rotation(state, ma.horizontal, ma.vertical, theta_a);
    state = gaussian::polarization_rotation(state, mb.horizontal, mb.vertical, theta_b);
    auto request = [](StationModes m, int k, int q) {
        return gaussian::make_request(k == 0 ? m.horizontal : m.vertical, q == 0 ? 0.0 : std::numbers::pi / 2);
    };
    CorrelationTerms t{};
    for (int ka = 0; ka < 2; ka++) {
        for (int qa = 0; qa < 2; qa++) {
            auto ra = request(ma, ka, qa);
            auto rb = request(mb, ka, qa);
            std::array<gaussian::QuadratureRequest, 2> sq_a{ra, ra};
            std::array<gaussian::QuadratureRequest, 2> sq_b{rb, rb};
            t.second_a[ka][qa] = gaussian::analytic_moment(state, sq_a);
            t.second_b[ka][qa] = gaussian::analytic_moment(state, sq_b);
            for (int kb = 0; kb < 2; kb++) {
                for (int qb = 0; qb < 2; qb++) {
                    auto rb2 = request(mb, kb, qb);
                    std::array<gaussian::QuadratureRequest, 4> f{ra, ra, rb2, rb2};
                    t.fourth[ka][qa][kb][qb] = gaussian::analytic_moment(state, f);
                }
            }
        }
    }
    for (int q = 0; q < 2; q++) {
        double phase = q == 0 ? 0.0 : std::numbers::pi / 2;
        std::array<gaussian::QuadratureRequest, 2> va{gaussian::make_request(ma.vacuum, phase), gaussian::make_request(ma.vacuum, phase)};
        std::array<gaussian::QuadratureRequest, 2> vb{gaussian::make_request(mb.vacuum, phase), gaussian::make_request(mb.vacuum, phase)};
        t.vacuum_a[q] = gaussian::analytic_moment(state, va);
        t.vacuum_b[q] = gaussian::analytic_moment(state, vb);
    }
    return t;
}

double oracle_correlation(const protocol::ExperimentConfig &config, double theta_a, double theta_b) {
    auto t = oracle_terms(config, theta_a, theta_b);
    double den = t.denominator();
    if (!(den > 1e-14)) {
        throw DegenerateCorrelationError(
            "Correlation undefined: the denominator vanishes (no photons at squeezing " +
            format_double(config.squeezing) + ").");
    }
    return t.numerator() / den;
}

double fock_correlation(const protocol::ExperimentConfig &config, double theta_a, double theta_b) {
    config.validate();
    size_t n = config.truncation;
    if (n + 1 > fock::MAX_TRUNCATION) {
        throw fock::TruncationError("Fock cross-check needs truncation <= " + std::to_string(fock::MAX_TRUNCATION - 1) + ".");
    }
    auto h = fock::two_mode_squeezed_vector(
        fock::build_space({ModeId::A_H, ModeId::B_H}, n), ModeId::A_H, ModeId::B_H, config.squeezing);
    auto v = fock::two_mode_squeezed_vector(
        fock::build_space({ModeId::A_V, ModeId::B_V}, n), ModeId::A_V, ModeId::B_V, config.squeezing);
    // Passive number operators raise a mode by at most one level.
    auto psi = fock::embed(fock::tensor_product(h, v), n + 1);
    const auto &space = psi.space();

    // n_out = b^dagger b with b = c a_h + s a_v (parallel) or -s a_h + c a_v (perpendicular).
    auto number = [&](StationModes m, double theta, bool perp, const Eigen::VectorXcd &x) {
        double c = std::cos(theta);
        double s = std::sin(theta);
        double wh = perp ? -s : c;
        double wv = perp ? c : s;
        fock::LinearCombination lower{
            {m.horizontal, fock::OperatorKind::annihilate, wh}, {m.vertical, fock::OperatorKind::annihilate, wv}};
        fock::LinearCombination raise{
            {m.horizontal, fock::OperatorKind::create, wh}, {m.vertical, fock::OperatorKind::create, wv}};
        return fock::apply(space, raise, fock::apply(space, lower, x));
    };
    auto ma = station_modes(Station::A);
    auto mb = station_modes(Station::B);
    const auto &x = psi.amplitudes();
    Eigen::VectorXcd nb_par = number(mb, theta_b, false, x);
    Eigen::VectorXcd nb_perp = number(mb, theta_b, true, x);
    Eigen::VectorXcd diff_b = nb_par - nb_perp;
    Eigen::VectorXcd sum_b = nb_par + nb_perp;
    Eigen::VectorXcd diff = number(ma, theta_a, false, diff_b) - number(ma, theta_a, true, diff_b);
    Eigen::VectorXcd sum = number(ma, theta_a, false, sum_b) + number(ma, theta_a, true, sum_b);
    double num = x.dot(diff).real();
    double den = x.dot(sum).real();
    if (!(den > 1e-14)) {
        throw DegenerateCorrelationError("Correlation undefined: no photons.");
    }
    return num / den;
}

ChshResult chsh(double e11, double e12, double e21, double e22, double se11, double se12, double se21, double se22) {
    return {std::abs(e11 - e12 + e21 + e22), std::sqrt(se11 * se11 + se12 * se12 + se21 * se21 + se22 * se22)};
}

ChshResult chsh(const std::array<CorrelationEstimate, 4> &e) {
    return chsh(
        e[0].e, e[1].e, e[2].e, e[3].e, e[0].standard_error, e[1].standard_error, e[2].standard_error,
        e[3].standard_error);
}

PositivityAudit positivity_audit(const RecordSet &records) {
    if (records.model != protocol::Model::lhv) {
        throw std::invalid_argument(
            "Positivity audit needs hidden-variable records: in the quantum model the individual count rates are "
            "inaccessible, only ensemble averages exist.");
    }
    auto audit = [&](Station station) {
        std::vector<double> rates;
        size_t negatives = 0;
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto &r : records.records) {
            if (!r.lhv) {
                throw std::invalid_argument("Hidden-variable record without individuals.");
            }
            const auto &rate = station == Station::A ? r.lhv->count_rate_a : r.lhv->count_rate_b;
            if (rate) {
                rates.push_back(*rate);
                negatives += *rate < 0 ? 1 : 0;
                lowest = std::min(lowest, *rate);
            }
        }
        if (rates.empty()) {
            throw StarvedSubensembleError(
                std::string("No quadrature trials at station ") + station_letter(station) + " to audit.");
        }
        auto stat = summarize(rates);
        return StationAudit{
            rates.size(), static_cast<double>(negatives) / static_cast<double>(rates.size()), lowest, stat.mean,
            stat.standard_error()};
    };
    return {audit(Station::A), audit(Station::B)};
}

VacuumCheck vacuum_check(const RecordSet &records) {
    VacuumCheck out{0, 0, 0, true, 0, 0, std::nullopt};
    std::vector<double> intensities;
    for (const auto &r : records.records) {
        for (Station station : {Station::A, Station::B}) {
            if (!r.setting(station).is_aux()) {
                continue;
            }
            (station == Station::A ? out.aux_trials_a : out.aux_trials_b)++;
            double x = r.outcome(station);
            intensities.push_back(x);
            if (x != 0.0) {
                out.nonzero_outcomes++;
                if (!out.aux_outcomes_until_nonzero) {
                    out.aux_outcomes_until_nonzero = intensities.size();
                }
            }
        }
    }
    if (out.aux_trials_a == 0 || out.aux_trials_b == 0) {
        throw CertificationError(
            "No auxiliary vacuum-intensity trials at station " + std::string(out.aux_trials_a == 0 ? "A" : "B") +
            ": the vacuum occupation is not measured, so positivity of the individual count rates cannot be "
            "certified.");
    }
    out.all_zero = out.nonzero_outcomes == 0;
    auto stat = summarize(intensities);
    out.mean_intensity = stat.mean;
    out.mean_intensity_standard_error = stat.standard_error();
    return out;
}

OracleSummary oracle_summary(const protocol::ExperimentConfig &config) {
    OracleSummary out;
    try {
        for (double ta : config.angles_a) {
            for (double tb : config.angles_b) {
                out.correlations.push_back({ta, tb, oracle_correlation(config, ta, tb)});
            }
        }
    } catch (const DegenerateCorrelationError &e) {
        out.correlations.clear();
        out.error = e.what();
        return out;
    }
    if (config.angles_a.size() == 2 && config.angles_b.size() == 2) {
        const auto &c = out.correlations;
        out.s = chsh(c[0][2], c[1][2], c[2][2], c[3][2]).s;
        try {
            std::array<double, 4> e{};
            for (size_t k = 0; k < 4; k++) {
                e[k] = fock_correlation(config, c[k][0], c[k][1]);
            }
            out.fock_s = chsh(e[0], e[1], e[2], e[3]).s;
        } catch (const fock::TruncationError &e) {
            out.fock_note = e.what();
        }
    }
    return out;
}

BellReport analyze(const RecordSet &records) {
    const auto &config = records.config;
    BellReport out;
    out.model = records.model;
    for (double ta : config.angles_a) {
        for (double tb : config.angles_b) {
            out.correlations.push_back(estimate_correlation(records, ta, tb));
        }
    }
    if (config.angles_a.size() == 2 && config.angles_b.size() == 2) {
        const auto &c = out.correlations;
        out.chsh = chsh({c[0], c[1], c[2], c[3]});
    }
    for (Station station : {Station::A, Station::B}) {
        for (double theta : config.angles(station)) {
            for (Output output : {Output::parallel, Output::perpendicular}) {
                out.count_rates.push_back(estimate_count_rate(records, station, theta, output));
            }
        }
    }
    if (records.model == protocol::Model::lhv) {
        out.positivity = positivity_audit(records);
    }
    try {
        out.vacuum = vacuum_check(records);
    } catch (const CertificationError &e) {
        out.vacuum_error = e.what();
    }
    return out;
}

namespace {

nlohmann::ordered_json station_audit_json(const StationAudit &a) {
    nlohmann::ordered_json j;
    j["trials"] = a.trials;
    j["negative_fraction"] = a.negative_fraction;
    j["min_count_rate"] = a.min_count_rate;
    j["mean_count_rate"] = a.mean_count_rate;
    j["mean_stderr"] = a.mean_standard_error;
    j["ensemble_nonnegative"] = a.ensemble_nonnegative();
    return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(
    const protocol::ExperimentConfig &config, const OracleSummary &oracle, std::span<const BellReport> reports) {
    nlohmann::ordered_json j;
    j["format"] = "cvbell-report";
    j["version"] = 1;
    j["config"] = protocol::config_to_json(config);
    j["correlation_definition"] =
        "E = <(R_par - R_perp)_A (R_par - R_perp)_B> / <(R_par + R_perp)_A (R_par + R_perp)_B>, "
        "R = (X1^2 + X2^2 - Xv1^2 - Xv2^2)/4";
    j["chsh_convention"] = "S = |E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2)|, a_i = angles_a[i-1], b_j = angles_b[j-1]";

    nlohmann::ordered_json o;
    if (!oracle.error.empty()) {
        o["error"] = oracle.error;
    } else {
        o["correlations"] = nlohmann::ordered_json::array();
        for (const auto &c : oracle.correlations) {
            o["correlations"].push_back({{"theta_a", c[0]}, {"theta_b", c[1]}, {"E", c[2]}});
        }
        if (oracle.s) {
            o["S"] = *oracle.s;
            o["S_exceeds_2"] = *oracle.s > 2;
        }
        if (oracle.fock_s) {
            o["fock_cross_check_S"] = *oracle.fock_s;
        } else if (!oracle.fock_note.empty()) {
            o["fock_cross_check_skipped"] = oracle.fock_note;
        }
    }
    j["oracle"] = o;

    j["models"] = nlohmann::ordered_json::array();
    for (const auto &r : reports) {
        nlohmann::ordered_json m;
        m["model"] = std::string(protocol::model_name(r.model));
        m["correlations"] = nlohmann::ordered_json::array();
        for (const auto &c : r.correlations) {
            m["correlations"].push_back(
                {{"theta_a", c.theta_a},
                 {"theta_b", c.theta_b},
                 {"E", c.e},
                 {"stderr", c.standard_error},
                 {"numerator", c.numerator},
                 {"denominator", c.denominator},
                 {"plausible", c.plausible()}});
        }
        if (r.chsh) {
            nlohmann::ordered_json s{{"S", r.chsh->s}, {"stderr", r.chsh->standard_error}};
            if (oracle.s && r.chsh->standard_error > 0) {
                s["sigma_from_oracle"] = (r.chsh->s - *oracle.s) / r.chsh->standard_error;
            }
            m["chsh"] = s;
        }
        m["count_rates"] = nlohmann::ordered_json::array();
        for (const auto &c : r.count_rates) {
            m["count_rates"].push_back(
                {{"station", std::string(1, station_letter(c.station))},
                 {"theta", c.theta},
                 {"output", c.output == Output::parallel ? "par" : "perp"},
                 {"mean", c.mean},
                 {"stderr", c.standard_error},
                 {"signal_trials", c.signal_counts},
                 {"vacuum_trials", c.vacuum_counts}});
        }
        if (r.positivity) {
            m["positivity_audit"] = {
                {"A", station_audit_json(r.positivity->a)}, {"B", station_audit_json(r.positivity->b)}};
        } else {
            m["positivity_audit"] = nullptr;
        }
        if (r.vacuum) {
            const auto &v = *r.vacuum;
            nlohmann::ordered_json vj;
            vj["aux_trials_a"] = v.aux_trials_a;
            vj["aux_trials_b"] = v.aux_trials_b;
            vj["nonzero_outcomes"] = v.nonzero_outcomes;
            vj["all_zero"] = v.all_zero;
            vj["mean_intensity"] = v.mean_intensity;
            vj["mean_intensity_stderr"] = v.mean_intensity_standard_error;
            if (v.aux_outcomes_until_nonzero) {
                vj["aux_outcomes_until_nonzero"] = *v.aux_outcomes_until_nonzero;
            } else {
                vj["aux_outcomes_until_nonzero"] = nullptr;
            }
            vj["verdict"] = v.all_zero ? "vacuum certified: V^dagger V = 0 in every aux trial"
                                       : "vacuum not certified: nonzero intensity on the vacuum mode";
            m["vacuum_check"] = vj;
        } else {
            m["vacuum_check"] = {{"error", r.vacuum_error}};
        }
        j["models"].push_back(m);
    }
    return j;
}

void write_correlation_table(const OracleSummary &oracle, std::span<const BellReport> reports, std::ostream &out) {
    out << "model,theta_a,theta_b,E,stderr,E_oracle\n";
    for (const auto &r : reports) {
        for (size_t k = 0; k < r.correlations.size(); k++) {
            const auto &c = r.correlations[k];
            out << protocol::model_name(r.model) << ',' << format_double(c.theta_a) << ',' << format_double(c.theta_b)
                << ',' << format_double(c.e) << ',' << format_double(c.standard_error) << ',';
            if (k < oracle.correlations.size()) {
                out << format_double(oracle.correlations[k][2]);
            }
            out << '\n';
        }
    }
}

}  // namespace cvbell::bell
