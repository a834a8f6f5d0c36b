/**
 * @file metrics.hpp
 * @brief Evaluation battery: amplitude rescaling, cross-correlation, and the
 *        mean / mean-positive / mean-negative power decomposition.
 */

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gait.hpp"
#include "series.hpp"

namespace exotorq {

/// Channels carrying joint power (W/kg) instead of torque use this suffix.
inline constexpr const char* kPowerSuffix = "_power";

struct PowerSummary {
    double mp_w_per_kg = 0.0;  ///< mean power, = mpp + mnp exactly
    double mpp_w_per_kg = 0.0; ///< mean positive power (sum of p > 0 over total n)
    double mnp_w_per_kg = 0.0; ///< mean negative power (sum of p < 0 over total n)
    std::size_t n = 0;         ///< total samples (shared divisor)
    std::size_t n_p = 0;       ///< samples with p > 0
    std::size_t n_n = 0;       ///< samples with p < 0 (zeros belong to neither)
};

/// Scalar gain max|gt| / max|pred|; multiplying the prediction by it matches
/// the GT amplitude range while keeping zeros at zero.
double rescale_gain(const std::vector<double>& pred, const std::vector<double>& gt);
std::vector<double> rescale_to_gt(const std::vector<double>& pred, const std::vector<double>& gt);

/// Zero-lag normalized (Pearson) correlation.
double cross_correlation(const std::vector<double>& a, const std::vector<double>& b);

struct LagCorrelation {
    double r = 0.0;
    int lag_pct = 0; ///< % of cycle `a` must be advanced by to best match `b`
};

/// Sweeps circular lags of up to max_lag_pct percent of the cycle in both
/// directions and returns the maximum r with its lag. Positive lag means the
/// first argument trails the second. Profiles are treated as one period with
/// the duplicated 100% point dropped for the shift.
LagCorrelation cross_correlation_sweep(const std::vector<double>& a,
                                       const std::vector<double>& b, int max_lag_pct = 20);

/// p_i = tau_i * omega_i over indices >= trim (trim comes from delay_shift).
UniformSeries power_series(const UniformSeries& torque, const UniformSeries& velocity,
                           std::size_t trim = 0);

PowerSummary power_summary(const std::vector<double>& p);
PowerSummary power_summary(const UniformSeries& p);

/// Mean and population SD of per-cycle power summaries.
struct PowerAggregate {
    double mp_mean = 0.0, mp_sd = 0.0;
    double mpp_mean = 0.0, mpp_sd = 0.0;
    double mnp_mean = 0.0, mnp_sd = 0.0;
    std::size_t cycle_count = 0;
};

PowerAggregate aggregate_cycle_power(const std::vector<CycleProfile>& cycles);

struct ChannelCorrelation {
    std::string channel;
    double r = 0.0;
    int lag_pct = 0;
};

struct EvalOptions {
    bool lag_sweep = false;          ///< sweep lags instead of zero-lag only
    int max_lag_pct = 20;
    bool per_cycle_correlation = false; ///< average per-cycle r instead of mean-profile r
};

struct ConditionEvaluation {
    std::vector<ChannelCorrelation> correlations; ///< one entry per channel
    std::vector<std::string> power_channels;      ///< channels ending in kPowerSuffix
    std::vector<PowerAggregate> pred_power;       ///< parallel to power_channels
    std::vector<PowerAggregate> gt_power;
};

/// Correlates matching channels of two cycle sets (prediction rescaled to GT
/// first) and aggregates per-cycle power stats for the power channels.
ConditionEvaluation evaluate_condition(const GaitCycleSet& pred, const GaitCycleSet& gt,
                                       const EvalOptions& opts = {});

} // namespace exotorq
