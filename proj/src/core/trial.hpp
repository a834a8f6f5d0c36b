/**
 * @file trial.hpp
 * @brief Canonical gait-trial representation, the CSV/sidecar schema, and
 *        directory cataloging.
 *
 * Canonical layout is one CSV per trial with header
 *   time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad[,<ch>_vel...][,<ch>_mom...]
 * plus a JSON sidecar of the same stem:
 *   {subject_id, condition:{kind, speed_mps|grade_deg}, sample_rate_hz,
 *    body_mass_kg?, angle_unit}
 */

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace exotorq {

inline constexpr std::size_t kJointCount = 4;
/// Fixed channel order used everywhere: left before right, hip before knee.
inline constexpr std::array<const char*, kJointCount> kJointNames = {"hip_l", "hip_r", "knee_l",
                                                                     "knee_r"};

using ChannelSet = std::array<std::vector<double>, kJointCount>;

enum class ConditionKind { LevelGround, Ramp };

struct Condition {
    ConditionKind kind = ConditionKind::LevelGround;
    double speed_mps = 0.0; ///< level-ground only
    double grade_deg = 0.0; ///< ramp only, positive = incline

    static Condition level(double speed_mps);
    static Condition ramp(double grade_deg);

    /// Stable identifier, e.g. "level_1.2" or "ramp_-10".
    std::string key() const;
    /// "level", "incline" or "decline" (Table-style environment grouping).
    std::string environment() const;

    bool operator==(const Condition& other) const;
};

struct Trial {
    std::string subject_id;
    Condition condition;
    double sample_rate_hz = 0.0;
    std::vector<double> time_s;
    ChannelSet angles_rad;
    std::optional<ChannelSet> velocities_rad_s;
    std::optional<ChannelSet> gt_moments_nm_per_kg;
    std::optional<double> body_mass_kg;
    std::string angle_unit = "rad"; ///< unit of the source file; storage is always rad

    std::size_t size() const { return time_s.size(); }
    /// Throws on any violated invariant (lengths, monotone time, jitter, finiteness).
    void validate() const;
};

/// Config-driven mapping from a source CSV layout onto the canonical channels.
/// Adapters for third-party datasets are ColumnMaps, not code forks.
struct ColumnMap {
    std::string time_col = "time_s";
    std::array<std::string, kJointCount> angle_cols = {"hip_l_rad", "hip_r_rad", "knee_l_rad",
                                                       "knee_r_rad"};
    std::optional<std::array<std::string, kJointCount>> velocity_cols;
    std::optional<std::array<std::string, kJointCount>> moment_cols;
    std::string angle_unit = "rad";              ///< "rad" or "deg"; sidecar value wins when present
    std::array<double, kJointCount> angle_sign = {1.0, 1.0, 1.0, 1.0}; ///< per-channel sign flip

    /// Canonical layout, velocity/moment columns auto-detected from the header.
    static ColumnMap canonical();
    static ColumnMap from_json(const std::string& json_text);
    std::string to_json() const;
};

struct TrialCatalog {
    std::vector<Trial> trials;
    std::map<std::string, std::string> provenance; ///< trial key -> source path
};

struct CatalogFailure {
    std::string path;
    Err code;
    std::string message;
};

struct CatalogResult {
    TrialCatalog catalog;
    std::vector<CatalogFailure> failures; ///< files that failed validation, never silently dropped
};

/// Loads one canonical CSV + sidecar pair. `path` points at the CSV.
Trial load_canonical_csv(const std::string& path, const ColumnMap& schema);

/// Writes `trial` as canonical CSV + sidecar. Values are printed with 17
/// significant digits so a reload is bit-exact.
void write_canonical_csv(const Trial& trial, const std::string& csv_path);

/// Parses every *.csv under `root` (non-recursive). Files failing validation
/// are reported in the result, valid ones still load. `jobs` > 1 parses files
/// concurrently; assembly order is deterministic either way.
CatalogResult catalog_directory(const std::string& root, const ColumnMap& schema, int jobs = 1);

std::string trial_key(const std::string& subject_id, const Condition& condition);

} // namespace exotorq
