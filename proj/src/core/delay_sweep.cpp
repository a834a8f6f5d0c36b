/**
 * @file delay_sweep.cpp
 */

#include "delay_sweep.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace exotorq {

namespace {

constexpr std::size_t kInferStart = std::size_t(kHistorySteps) - 1;

UniformSeries span_series(const Trial& trial, const std::vector<double>& channel) {
    UniformSeries s;
    s.rate_hz = trial.sample_rate_hz;
    s.start_s = trial.time_s[kInferStart];
    s.values.assign(channel.begin() + long(kInferStart), channel.end());
    return s;
}

/// Mean 101-point profile of `p` over the cycle spans that survive the trim.
/// Span indices are trial sample indices; `p` starts at trial index
/// kInferStart + trim.
CycleProfile mean_profile_over_spans(const UniformSeries& p, std::size_t trim,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
    const std::size_t offset = kInferStart + trim;
    std::vector<CycleProfile> profiles;
    for (const auto& [a, b] : spans) {
        if (a < offset) continue;
        profiles.push_back(normalize_cycle(p, a - offset, b - offset));
    }
    if (profiles.empty())
        fail(Err::NoCyclesFound, "no gait cycle fits inside the trimmed region");
    return ensemble(profiles).mean;
}

} // namespace

std::array<UniformSeries, kJointCount> predict_torque_nm_per_kg(const TorqueModel& model,
                                                                const Trial& trial,
                                                                double delay_feature_s) {
    auto series = infer_trial(model, trial, delay_feature_s);
    for (std::size_t j = 0; j < kJointCount; ++j) {
        double gain = 0.0;
        if (trial.gt_moments_nm_per_kg) {
            const std::vector<double> gt((*trial.gt_moments_nm_per_kg)[j].begin() + long(kInferStart),
                                         (*trial.gt_moments_nm_per_kg)[j].end());
            gain = rescale_gain(series[j].values, gt);
        } else {
            if (!trial.body_mass_kg)
                fail(Err::InvalidArgument,
                     "trial has neither GT moments nor body mass; cannot convert "
                     "normalized torque to Nm/kg");
            gain = model.tau_max_nm / *trial.body_mass_kg;
        }
        for (double& v : series[j].values) v *= gain;
    }
    return series;
}

DelaySweepResult run_delay_sweep(const Trial& trial, const TorqueModel& model,
                                 const DelaySweepOptions& opts) {
    std::vector<double> delays = opts.delays_s;
    for (double d : delays)
        if (!(d >= 0.0)) fail(Err::InvalidArgument, "delays must be >= 0");
    if (std::find(delays.begin(), delays.end(), 0.0) == delays.end()) delays.push_back(0.0);
    std::sort(delays.begin(), delays.end());
    delays.erase(std::unique(delays.begin(), delays.end()), delays.end());

    // Segment on the full-length channel so anchors are trial indices.
    UniformSeries hip_full;
    hip_full.rate_hz = trial.sample_rate_hz;
    hip_full.start_s = trial.time_s.empty() ? 0.0 : trial.time_s[0];
    hip_full.values = trial.angles_rad[opts.segment.anchor_joint];
    const Segmentation seg = segment_cycles(hip_full, opts.segment);

    if (!trial.velocities_rad_s) fail(Err::MissingVelocities, "delay sweep needs velocities");
    std::array<UniformSeries, kJointCount> vel;
    for (std::size_t j = 0; j < kJointCount; ++j)
        vel[j] = span_series(trial, (*trial.velocities_rad_s)[j]);

    DelaySweepResult result;
    result.delays_s = delays;

    std::array<UniformSeries, kJointCount> pred;
    if (!opts.co_vary_input_delay)
        pred = predict_torque_nm_per_kg(model, trial, opts.delay_feature_s);

    for (double d : delays) {
        if (opts.co_vary_input_delay)
            pred = predict_torque_nm_per_kg(model, trial, opts.delay_feature_s + d);

        DelayLevelResult level;
        level.delay_s = d;
        for (std::size_t j = 0; j < kJointCount; ++j) {
            const DelayShifted shifted = delay_shift(pred[j], d);
            level.shift_samples = shifted.trim_count;
            const UniformSeries p = power_series(shifted.series, vel[j], shifted.trim_count);
            level.power[j] = power_summary(p);
            level.mean_power_profile[j] = mean_profile_over_spans(p, shifted.trim_count, seg.cycles);
        }
        result.levels.push_back(std::move(level));
    }

    const DelayLevelResult& base = result.levels.front();
    for (auto& level : result.levels) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            level.mp_delta[j] = level.power[j].mp_w_per_kg - base.power[j].mp_w_per_kg;
            level.mpp_delta[j] = level.power[j].mpp_w_per_kg - base.power[j].mpp_w_per_kg;
            level.mnp_delta[j] = level.power[j].mnp_w_per_kg - base.power[j].mnp_w_per_kg;
        }
    }

    if (trial.gt_moments_nm_per_kg) {
        result.has_gt = true;
        for (std::size_t j = 0; j < kJointCount; ++j) {
            const UniformSeries gt = span_series(trial, (*trial.gt_moments_nm_per_kg)[j]);
            const UniformSeries p = power_series(gt, vel[j], 0);
            result.gt_power[j] = power_summary(p);
            result.gt_mean_power_profile[j] = mean_profile_over_spans(p, 0, seg.cycles);
        }
    }
    return result;
}

} // namespace exotorq
