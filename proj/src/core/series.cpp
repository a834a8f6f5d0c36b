#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace exotorq {

UniformSeries resample(const UniformSeries& series, double target_hz) {
    if (series.size() < 2) {
        fail(Err::TooShort, "resample requires at least 2 samples, got " +
                                std::to_string(series.size()));
    }
    if (target_hz <= 0.0) {
        fail(Err::InvalidArgument, "resample target rate must be positive");
    }

    const std::size_t n = series.size();
    // Last target index whose timestamp does not pass the source endpoint.
    // The epsilon absorbs rate-ratio rounding so shared grid points survive.
    const double ratio = target_hz / series.rate_hz;
    const auto out_len = static_cast<std::size_t>(
                             std::floor(static_cast<double>(n - 1) * ratio + 1e-9)) +
                         1;

    UniformSeries out;
    out.rate_hz = target_hz;
    out.start_s = series.start_s;
    out.values.resize(out_len);

    const double step = series.rate_hz / target_hz; // source indices per target index
    for (std::size_t j = 0; j < out_len; ++j) {
        const double pos = static_cast<double>(j) * step;
        auto i0 = static_cast<std::size_t>(std::floor(pos));
        if (i0 >= n - 1) i0 = n - 2;
        const double frac = pos - static_cast<double>(i0);
        if (frac == 0.0) {
            out.values[j] = series.values[i0];
        } else {
            out.values[j] = series.values[i0] + frac * (series.values[i0 + 1] - series.values[i0]);
        }
    }
    return out;
}

UniformSeries central_diff(const UniformSeries& angles) {
    const std::size_t n = angles.size();
    if (n < 3) {
        fail(Err::TooShort, "central_diff requires at least 3 samples, got " + std::to_string(n));
    }

    UniformSeries out;
    out.rate_hz = angles.rate_hz;
    out.start_s = angles.start_s;
    out.values.resize(n);

    const double r = angles.rate_hz;
    out.values[0] = (angles.values[1] - angles.values[0]) * r;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.values[i] = (angles.values[i + 1] - angles.values[i - 1]) * r * 0.5;
    }
    out.values[n - 1] = (angles.values[n - 1] - angles.values[n - 2]) * r;
    return out;
}

double normalize_clip_torque(double tau_nm, double tau_max_nm) {
    if (!(tau_max_nm > 0.0)) {
        fail(Err::NonPositiveMax, "tau_max_nm must be positive");
    }
    return std::clamp(tau_nm / tau_max_nm, -1.0, 1.0);
}

DelayShifted delay_shift(const UniformSeries& series, double delay_s) {
    if (delay_s < 0.0) {
        fail(Err::InvalidArgument, "delay_s must be non-negative");
    }
    const auto k = static_cast<std::size_t>(std::llround(delay_s * series.rate_hz));
    if (k >= series.size()) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "delay of %zu samples exceeds series length %zu", k,
                      series.size());
        fail(Err::DelayExceedsSeries, buf);
    }

    DelayShifted out;
    out.trim_count = k;
    out.series.rate_hz = series.rate_hz;
    out.series.start_s = series.start_s;
    out.series.values.resize(series.size());
    for (std::size_t i = 0; i < k; ++i) {
        out.series.values[i] = series.values[0];
    }
    for (std::size_t i = k; i < series.size(); ++i) {
        out.series.values[i] = series.values[i - k];
    }
    return out;
}

} // namespace exotorq
