/**
 * @file delay_sweep.hpp
 * @brief Delay-injection study: shift the inferred torque by fixed intervals,
 *        recompute joint power against the unshifted velocity, and report the
 *        change versus the zero-delay baseline.
 */

#pragma once

#include <array>
#include <vector>

#include "gait.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "series.hpp"
#include "trial.hpp"

namespace exotorq {

inline const std::vector<double> kDefaultDelays = {0.0, 0.05, 0.10, 0.15};

struct DelaySweepOptions {
    std::vector<double> delays_s = kDefaultDelays;
    double delay_feature_s = kDefaultDelayFeatureS; ///< value fed to the model input
    bool co_vary_input_delay = false; ///< also add the injected delay to the model input
    SegmentConfig segment{};
};

struct DelayLevelResult {
    double delay_s = 0.0;
    std::size_t shift_samples = 0; ///< round(delay * rate), also the trim count
    std::array<PowerSummary, kJointCount> power{};
    std::array<CycleProfile, kJointCount> mean_power_profile{};
    std::array<double, kJointCount> mp_delta{};  ///< vs zero-delay baseline
    std::array<double, kJointCount> mpp_delta{};
    std::array<double, kJointCount> mnp_delta{};
};

struct DelaySweepResult {
    std::vector<double> delays_s; ///< sorted ascending, 0 always present
    std::vector<DelayLevelResult> levels;
    bool has_gt = false;
    std::array<PowerSummary, kJointCount> gt_power{};
    std::array<CycleProfile, kJointCount> gt_mean_power_profile{};
};

/// Inferred torque in physical units. With GT moments present the per-joint
/// gain is max|GT| / max|prediction| over the inferred span; otherwise
/// tau_max_nm / body_mass_kg (which the trial must then carry).
std::array<UniformSeries, kJointCount> predict_torque_nm_per_kg(const TorqueModel& model,
                                                                const Trial& trial,
                                                                double delay_feature_s);

/// For each delay: infer, shift, trim, multiply by the unshifted velocity,
/// summarize, and segment into mean cycle profiles. The zero-delay level is
/// bit-identical to the plain inference path.
DelaySweepResult run_delay_sweep(const Trial& trial, const TorqueModel& model,
                                 const DelaySweepOptions& opts = {});

} // namespace exotorq
