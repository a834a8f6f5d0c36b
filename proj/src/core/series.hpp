/**
 * @file series.hpp
 * @brief Uniform-rate series and the resampling / differentiation / delay
 *        primitives used by every downstream stage.
 */

#pragma once

#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace exotorq {

/// A single channel sampled on an implicit uniform grid:
/// timestamp(i) = start_s + i / rate_hz.
struct UniformSeries {
    double rate_hz = 0.0;
    double start_s = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return start_s + static_cast<double>(i) / rate_hz; }
    double end_s() const { return values.empty() ? start_s : time_at(values.size() - 1); }
};

/// Linear interpolation onto the uniform target grid spanning [start, end].
/// Never extrapolates: the output grid ends at or before the source endpoint.
/// Exact on affine signals and an identity at equal rates.
UniformSeries resample(const UniformSeries& series, double target_hz);

/// Central finite differences on the interior, one-sided first differences at
/// the endpoints. Output rate and start match the input.
UniformSeries central_diff(const UniformSeries& angles);

/// clamp(tau / tau_max, -1, 1).
double normalize_clip_torque(double tau_nm, double tau_max_nm);

struct DelayShifted {
    UniformSeries series;   ///< same length as input; shifted[i] = input[i-k] for i >= k
    std::size_t trim_count; ///< k = round(delay_s * rate); leading k samples are invalid
};

/// Shifts a series later in time by round(delay_s * rate) samples. The leading
/// gap holds the first input value; consumers must skip trim_count samples.
DelayShifted delay_shift(const UniformSeries& series, double delay_s);

} // namespace exotorq
