/**
 * @file gait.hpp
 * @brief Gait-cycle segmentation anchored at maximum hip flexion, 0-100%
 *        normalization onto a 101-point grid, and ensemble statistics.
 */

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "series.hpp"

namespace exotorq {

inline constexpr std::size_t kCyclePoints = 101; ///< 1% gait-cycle resolution

struct SegmentConfig {
    double min_cycle_s = 0.6;          ///< minimum anchor separation
    double prominence_frac = 0.3;      ///< peak prominence as a fraction of signal range
    double max_duration_dev = 0.3;     ///< cycles off the median duration by more are dropped
    std::size_t anchor_joint = 0;      ///< channel index of the anchoring hip (default hip_l)
    double flexion_sign = 1.0;         ///< maps the hip angle to flexion-positive before peaks
};

struct Segmentation {
    std::vector<std::size_t> anchors; ///< qualifying maximum-flexion peaks, strictly increasing
    std::vector<std::pair<std::size_t, std::size_t>> cycles; ///< consecutive-anchor spans kept
};

/// Anchors are local maxima of the flexion-positive signal with prominence
/// >= prominence_frac * range and separation >= min_cycle_s. Leading/trailing
/// partial cycles are implicit (data outside the anchor span is unused);
/// spans deviating more than max_duration_dev from the median are dropped.
Segmentation segment_cycles(const UniformSeries& hip_flexion, const SegmentConfig& cfg);

using CycleProfile = std::vector<double>; ///< kCyclePoints values over 0..100%

/// Linear interpolation of channel[start..end] onto 101 evenly spaced points.
/// profile.front() == channel[start], profile.back() == channel[end].
CycleProfile normalize_cycle(const UniformSeries& channel, std::size_t start, std::size_t end);

struct EnsembleStats {
    CycleProfile mean;
    CycleProfile sd; ///< population standard deviation
};

EnsembleStats ensemble(const std::vector<CycleProfile>& cycles);

/// Segmented, grid-normalized cycles for a set of named channels sharing one
/// segmentation.
struct GaitCycleSet {
    std::vector<std::size_t> anchor_indices;
    double source_rate_hz = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::vector<std::string> channel_names;
    std::vector<std::vector<CycleProfile>> cycles; ///< [channel][cycle]
    std::vector<CycleProfile> mean_profile;        ///< [channel]
    std::vector<CycleProfile> sd_profile;          ///< [channel]

    std::size_t cycle_count() const { return spans.size(); }
};

/// Applies one segmentation to several channels and computes the ensembles.
GaitCycleSet build_cycle_set(const Segmentation& seg, double source_rate_hz,
                             const std::vector<std::string>& names,
                             const std::vector<const UniformSeries*>& channels);

} // namespace exotorq
