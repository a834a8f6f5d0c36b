/**
 * @file gait.cpp
 */

#include "gait.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace exotorq {

namespace {

/// Classic prominence: walk outward until strictly higher terrain or the
/// boundary, tracking the lowest sample seen on each side.
double peak_prominence(const std::vector<double>& s, std::size_t i) {
    const double h = s[i];
    double left_min = h;
    for (std::size_t j = i; j-- > 0;) {
        if (s[j] > h) break;
        left_min = std::min(left_min, s[j]);
    }
    double right_min = h;
    for (std::size_t j = i + 1; j < s.size(); ++j) {
        if (s[j] > h) break;
        right_min = std::min(right_min, s[j]);
    }
    return h - std::max(left_min, right_min);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

Segmentation segment_cycles(const UniformSeries& hip_flexion, const SegmentConfig& cfg) {
    if (!(cfg.min_cycle_s > 0.0)) fail(Err::InvalidArgument, "min_cycle_s must be positive");
    const std::size_t n = hip_flexion.values.size();
    const std::size_t min_len =
        static_cast<std::size_t>(std::ceil(2.0 * cfg.min_cycle_s * hip_flexion.rate_hz));
    if (n < min_len)
        fail(Err::TooShort, "series shorter than two minimum cycles (" + std::to_string(n) +
                                " < " + std::to_string(min_len) + " samples)");

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = cfg.flexion_sign * hip_flexion.values[i];

    const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
    const double range = *mx_it - *mn_it;
    if (range < 1e-9) fail(Err::DegenerateSignal, "signal range below 1e-9");

    const double min_prom = cfg.prominence_frac * range;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1] && peak_prominence(s, i) >= min_prom)
            candidates.push_back(i);
    }

    // Enforce minimum separation, higher peaks first (ties go to the earlier index).
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s[candidates[a]] > s[candidates[b]];
    });
    const double min_sep = cfg.min_cycle_s * hip_flexion.rate_hz;
    std::vector<bool> keep(candidates.size(), true);
    for (std::size_t oi : order) {
        if (!keep[oi]) continue;
        for (std::size_t oj = 0; oj < candidates.size(); ++oj) {
            if (oj == oi || !keep[oj]) continue;
            const double gap = candidates[oi] > candidates[oj]
                                   ? double(candidates[oi] - candidates[oj])
                                   : double(candidates[oj] - candidates[oi]);
            if (gap < min_sep) keep[oj] = false;
        }
    }

    Segmentation seg;
    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (keep[k]) seg.anchors.push_back(candidates[k]);

    if (seg.anchors.size() < 2)
        fail(Err::NoCyclesFound, "fewer than two anchors; no complete cycle");

    std::vector<double> durations;
    for (std::size_t k = 0; k + 1 < seg.anchors.size(); ++k)
        durations.push_back(double(seg.anchors[k + 1] - seg.anchors[k]));
    const double med = median_of(durations);
    for (std::size_t k = 0; k + 1 < seg.anchors.size(); ++k) {
        if (std::abs(durations[k] - med) <= cfg.max_duration_dev * med)
            seg.cycles.emplace_back(seg.anchors[k], seg.anchors[k + 1]);
    }
    if (seg.cycles.empty()) fail(Err::NoCyclesFound, "duration filter removed every cycle");
    return seg;
}

CycleProfile normalize_cycle(const UniformSeries& channel, std::size_t start, std::size_t end) {
    if (end >= channel.values.size() || start >= end)
        fail(Err::InvalidArgument, "cycle span out of range");
    if (end - start < 2) fail(Err::SpanTooShort, "cycle spans fewer than 2 samples");

    CycleProfile profile(kCyclePoints);
    const double span = double(end - start);
    for (std::size_t j = 0; j < kCyclePoints; ++j) {
        if (j == kCyclePoints - 1) {
            profile[j] = channel.values[end];
            continue;
        }
        const double pos = double(start) + double(j) * span / double(kCyclePoints - 1);
        const auto i0 = static_cast<std::size_t>(pos);
        const double frac = pos - double(i0);
        profile[j] = frac == 0.0 ? channel.values[i0]
                                 : channel.values[i0] +
                                       (channel.values[i0 + 1] - channel.values[i0]) * frac;
    }
    return profile;
}

EnsembleStats ensemble(const std::vector<CycleProfile>& cycles) {
    if (cycles.empty()) fail(Err::EmptySet, "ensemble of zero cycles");
    const std::size_t m = cycles.size();
    for (const auto& c : cycles)
        if (c.size() != kCyclePoints)
            fail(Err::LengthMismatch, "profile is not on the 101-point grid");

    EnsembleStats st;
    st.mean.assign(kCyclePoints, 0.0);
    st.sd.assign(kCyclePoints, 0.0);
    for (std::size_t k = 0; k < kCyclePoints; ++k) {
        double acc = 0.0;
        for (const auto& c : cycles) acc += c[k];
        st.mean[k] = acc / double(m);
        double var = 0.0;
        for (const auto& c : cycles) {
            const double d = c[k] - st.mean[k];
            var += d * d;
        }
        st.sd[k] = std::sqrt(var / double(m));
    }
    return st;
}

GaitCycleSet build_cycle_set(const Segmentation& seg, double source_rate_hz,
                             const std::vector<std::string>& names,
                             const std::vector<const UniformSeries*>& channels) {
    if (names.size() != channels.size())
        fail(Err::LengthMismatch, "channel name/series count mismatch");
    GaitCycleSet set;
    set.anchor_indices = seg.anchors;
    set.spans = seg.cycles;
    set.source_rate_hz = source_rate_hz;
    set.channel_names = names;
    set.cycles.resize(channels.size());
    set.mean_profile.resize(channels.size());
    set.sd_profile.resize(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c) {
        for (const auto& [a, b] : seg.cycles)
            set.cycles[c].push_back(normalize_cycle(*channels[c], a, b));
        const auto st = ensemble(set.cycles[c]);
        set.mean_profile[c] = st.mean;
        set.sd_profile[c] = st.sd;
    }
    return set;
}

} // namespace exotorq
