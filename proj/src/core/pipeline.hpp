/**
 * @file pipeline.hpp
 * @brief Run configuration and the command implementations behind the CLI
 *        verbs: convert, synth, train, infer, evaluate, delay-sweep, report.
 *
 * Every emitted file carries a provenance header (tool version, config
 * checksum, model checksum, seed) and is written atomically. Reruns with the
 * same config and inputs produce byte-identical numeric payloads.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delay_sweep.hpp"
#include "gait.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "synth.hpp"
#include "trial.hpp"

namespace exotorq {

inline constexpr const char* kToolVersion = "exotorq 1.0.0";
/// Default config path is read from this variable when --config is absent.
inline constexpr const char* kConfigEnvVar = "EXOTORQ_CONFIG";

struct ConvertConfig {
    std::string raw_dir;
    ColumnMap column_map = ColumnMap::canonical();
};

struct SynthConfig {
    SynthSpec spec = default_synth_spec();
    std::vector<std::string> subjects;   ///< default: just spec.subject_id
    std::vector<Condition> conditions;   ///< default: just spec.condition
};

struct TrainRunConfig {
    std::string trials_dir;
    TrainConfig train{};
    double delay_feature_s = kDefaultDelayFeatureS;
    double tau_max_nm = kDefaultTauMaxNm;
};

struct InferConfig {
    std::string trial_csv;
    std::string model_file;
    double delay_feature_s = kDefaultDelayFeatureS;
};

struct EvaluateConfig {
    std::string trials_dir;
    std::string model_file;               ///< may be empty in inject mode
    std::string tag = "standard";         ///< e.g. "mismatched" for the cross-task scenario
    bool inject_gt_as_pred = false;       ///< pipeline self-check: prediction := GT
    std::vector<std::string> subjects;    ///< include filter; empty = all
    std::vector<std::string> exclude_subjects;
    double delay_feature_s = kDefaultDelayFeatureS;
    EvalOptions eval{};
    SegmentConfig segment{};
};

struct DelaySweepRunConfig {
    std::string trials_dir;
    std::string model_file;
    /// Condition filter; the default is the typical-walking set. An empty
    /// list (explicit in config, or --all-conditions) sweeps every trial.
    std::vector<Condition> conditions = {Condition::level(1.2), Condition::ramp(5.0),
                                         Condition::ramp(-5.0)};
    DelaySweepOptions sweep{};
};

struct ReportConfig {
    std::string report_json; ///< report.json produced by evaluate
};

struct RunConfig {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = "out";

    ConvertConfig convert;
    SynthConfig synth;
    TrainRunConfig train;
    InferConfig infer;
    EvaluateConfig evaluate;
    DelaySweepRunConfig delay_sweep;
    ReportConfig report;

    /// Canonical JSON of the effective config; hashed into provenance.
    std::string to_json() const;
    static RunConfig from_json(const std::string& json_text);
    static RunConfig from_file(const std::string& path);
};

struct Provenance {
    std::string tool_version = kToolVersion;
    std::string config_crc32;         ///< over RunConfig::to_json()
    std::string model_crc32 = "none"; ///< parameter payload CRC when a model is involved
    std::uint64_t seed = 0;
};

Provenance make_provenance(const RunConfig& cfg);
std::string provenance_csv_header(const Provenance& p);

/// Resamples to 100 Hz and fills in velocities by central differencing when
/// the trial does not carry them. Present channels survive an equal-rate
/// resample bit-exactly.
Trial prepare_trial(const Trial& raw);

struct ConvertOutcome {
    std::vector<std::string> written; ///< canonical CSV paths, sorted
    std::vector<CatalogFailure> failures;
};
ConvertOutcome cmd_convert(const RunConfig& cfg);

struct SynthOutcome {
    std::vector<std::string> written;
};
SynthOutcome cmd_synth(const RunConfig& cfg);

struct TrainOutcome {
    std::string model_path;
    std::string loss_csv_path;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::size_t sample_count = 0;
    std::string model_crc32;
    std::vector<CatalogFailure> failures; ///< trials skipped (no GT, no mass, ...)
};
TrainOutcome cmd_train(const RunConfig& cfg);

struct InferOutcome {
    std::string csv_path;
    std::size_t rows = 0;
};
InferOutcome cmd_infer(const RunConfig& cfg);

/// One evaluated condition: correlations reduced to summary rows
/// (hip/knee = mean of left and right channels) plus per-joint power stats.
struct ConditionReport {
    std::string condition_key;
    std::string environment;
    std::size_t trial_count = 0;
    std::size_t cycle_count = 0;
    std::vector<ChannelCorrelation> correlations; ///< all torque + power channels
    double hip_torque_r = 0.0, knee_torque_r = 0.0;
    double hip_power_r = 0.0, knee_power_r = 0.0;
    std::vector<std::string> power_channels;
    std::vector<PowerAggregate> pred_power; ///< parallel to power_channels
    std::vector<PowerAggregate> gt_power;
};

struct EnvironmentReport {
    std::string environment;
    std::size_t condition_count = 0;
    double hip_torque_r = 0.0, knee_torque_r = 0.0;
    double hip_power_r = 0.0, knee_power_r = 0.0;
};

struct ProfileBlock {
    std::string condition_key;
    std::string channel;
    CycleProfile pred_mean, pred_sd;
    CycleProfile gt_mean, gt_sd;
};

struct EvaluationReport {
    std::string tag;
    std::vector<ConditionReport> conditions;     ///< sorted by condition key
    std::vector<EnvironmentReport> environments; ///< level, incline, decline
    std::vector<ProfileBlock> profiles;
    std::vector<CatalogFailure> failures;
};

/// Plain mean across per-condition values; the report tables round the
/// result to two decimals at print time.
double environment_average(const std::vector<double>& values);

struct EvaluateOutcome {
    EvaluationReport report;
    std::string report_json_path;
    std::vector<std::string> written; ///< all emitted files
};
EvaluateOutcome cmd_evaluate(const RunConfig& cfg);

struct TrialSweep {
    std::string trial_key;
    DelaySweepResult result;
};

struct DelaySweepOutcome {
    std::vector<TrialSweep> sweeps; ///< sorted by trial key
    std::vector<std::string> written;
    std::vector<CatalogFailure> failures;
};
DelaySweepOutcome cmd_delay_sweep(const RunConfig& cfg);

struct ReportOutcome {
    std::vector<std::string> written;
};
/// Re-emits the table / profile CSVs from a previously written report.json.
ReportOutcome cmd_report(const RunConfig& cfg);

} // namespace exotorq
