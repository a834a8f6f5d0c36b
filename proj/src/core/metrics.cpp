/**
 * @file metrics.cpp
 */

#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace exotorq {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

double pop_sd(const std::vector<double>& v, double mean) {
    double var = 0.0;
    for (double x : v) {
        const double d = x - mean;
        var += d * d;
    }
    return std::sqrt(var / double(v.size()));
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

double rescale_gain(const std::vector<double>& pred, const std::vector<double>& gt) {
    if (pred.size() != gt.size()) fail(Err::LengthMismatch, "rescale profiles differ in length");
    const double peak = max_abs(pred);
    if (peak <= 1e-9) fail(Err::DegeneratePrediction, "prediction peak below 1e-9");
    return max_abs(gt) / peak;
}

std::vector<double> rescale_to_gt(const std::vector<double>& pred, const std::vector<double>& gt) {
    const double g = rescale_gain(pred, gt);
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = g * pred[i];
    return out;
}

double cross_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) fail(Err::LengthMismatch, "correlation inputs differ in length");
    if (a.empty()) fail(Err::EmptySeries, "correlation of empty vectors");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double n = double(a.size());
    if (saa / n <= 1e-12 || sbb / n <= 1e-12)
        fail(Err::ZeroVariance, "correlation input has variance <= 1e-12");
    return sab / std::sqrt(saa * sbb);
}

LagCorrelation cross_correlation_sweep(const std::vector<double>& a, const std::vector<double>& b,
                                       int max_lag_pct) {
    if (a.size() != b.size()) fail(Err::LengthMismatch, "correlation inputs differ in length");
    if (a.size() < 3) fail(Err::EmptySeries, "profile too short for a lag sweep");
    if (max_lag_pct < 0) fail(Err::InvalidArgument, "negative lag range");

    // One period: the final grid point repeats the 0% phase.
    const std::size_t period = a.size() - 1;
    const std::vector<double> pa(a.begin(), a.begin() + long(period));
    const std::vector<double> pb(b.begin(), b.begin() + long(period));

    const int max_lag = std::min<int>(max_lag_pct, int(period) - 1);
    LagCorrelation best;
    bool first = true;
    std::vector<double> shifted(period);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        for (std::size_t i = 0; i < period; ++i) {
            const long j = (long(i) + lag % long(period) + long(period)) % long(period);
            shifted[i] = pa[std::size_t(j)];
        }
        const double r = cross_correlation(shifted, pb);
        if (first || r > best.r) {
            best.r = r;
            best.lag_pct = lag;
            first = false;
        }
    }
    return best;
}

UniformSeries power_series(const UniformSeries& torque, const UniformSeries& velocity,
                           std::size_t trim) {
    if (torque.values.size() != velocity.values.size())
        fail(Err::LengthMismatch, "torque/velocity length mismatch");
    if (torque.rate_hz != velocity.rate_hz)
        fail(Err::RateMismatch, "torque/velocity rate mismatch");
    if (torque.values.empty()) fail(Err::EmptySeries, "power of empty series");
    if (trim >= torque.values.size())
        fail(Err::InvalidArgument, "trim leaves no samples");

    UniformSeries p;
    p.rate_hz = torque.rate_hz;
    p.start_s = torque.time_at(trim);
    p.values.resize(torque.values.size() - trim);
    for (std::size_t i = trim; i < torque.values.size(); ++i)
        p.values[i - trim] = torque.values[i] * velocity.values[i];
    return p;
}

PowerSummary power_summary(const std::vector<double>& p) {
    if (p.empty()) fail(Err::EmptySeries, "power summary of empty series");
    PowerSummary s;
    s.n = p.size();
    double pos = 0.0, neg = 0.0;
    for (double x : p) {
        if (x > 0.0) {
            pos += x;
            ++s.n_p;
        } else if (x < 0.0) {
            neg += x;
            ++s.n_n;
        }
    }
    s.mpp_w_per_kg = pos / double(s.n);
    s.mnp_w_per_kg = neg / double(s.n);
    s.mp_w_per_kg = s.mpp_w_per_kg + s.mnp_w_per_kg;
    return s;
}

PowerSummary power_summary(const UniformSeries& p) { return power_summary(p.values); }

PowerAggregate aggregate_cycle_power(const std::vector<CycleProfile>& cycles) {
    if (cycles.empty()) fail(Err::EmptySet, "power aggregate of zero cycles");
    std::vector<double> mp, mpp, mnp;
    mp.reserve(cycles.size());
    for (const auto& c : cycles) {
        const PowerSummary s = power_summary(c);
        mp.push_back(s.mp_w_per_kg);
        mpp.push_back(s.mpp_w_per_kg);
        mnp.push_back(s.mnp_w_per_kg);
    }
    PowerAggregate a;
    a.cycle_count = cycles.size();
    a.mp_mean = mean_of(mp);
    a.mp_sd = pop_sd(mp, a.mp_mean);
    a.mpp_mean = mean_of(mpp);
    a.mpp_sd = pop_sd(mpp, a.mpp_mean);
    a.mnp_mean = mean_of(mnp);
    a.mnp_sd = pop_sd(mnp, a.mnp_mean);
    return a;
}

ConditionEvaluation evaluate_condition(const GaitCycleSet& pred, const GaitCycleSet& gt,
                                       const EvalOptions& opts) {
    if (pred.channel_names != gt.channel_names)
        fail(Err::ChannelMismatch, "prediction/GT cycle sets expose different channels");

    ConditionEvaluation ev;
    for (std::size_t c = 0; c < pred.channel_names.size(); ++c) {
        ChannelCorrelation cc;
        cc.channel = pred.channel_names[c];
        if (opts.per_cycle_correlation) {
            if (pred.cycles[c].size() != gt.cycles[c].size())
                fail(Err::LengthMismatch, "per-cycle correlation needs matching cycle counts");
            double acc = 0.0;
            for (std::size_t k = 0; k < pred.cycles[c].size(); ++k)
                acc += cross_correlation(pred.cycles[c][k], gt.cycles[c][k]);
            cc.r = acc / double(pred.cycles[c].size());
            cc.lag_pct = 0;
        } else {
            const auto scaled = rescale_to_gt(pred.mean_profile[c], gt.mean_profile[c]);
            if (opts.lag_sweep) {
                const auto best = cross_correlation_sweep(scaled, gt.mean_profile[c], opts.max_lag_pct);
                cc.r = best.r;
                cc.lag_pct = best.lag_pct;
            } else {
                cc.r = cross_correlation(scaled, gt.mean_profile[c]);
                cc.lag_pct = 0;
            }
        }
        ev.correlations.push_back(std::move(cc));

        if (ends_with(pred.channel_names[c], kPowerSuffix)) {
            ev.power_channels.push_back(pred.channel_names[c]);
            ev.pred_power.push_back(aggregate_cycle_power(pred.cycles[c]));
            ev.gt_power.push_back(aggregate_cycle_power(gt.cycles[c]));
        }
    }
    return ev;
}

} // namespace exotorq
