/**
 * @file mlp.hpp
 * @brief Torque-policy MLP: feature-window construction, inference, the
 *        regularized supervised loss, exact backpropagation, and a
 *        deterministic mini-batch trainer.
 *
 * The policy maps a 33-feature state (four consecutive 100 Hz time steps of
 * bilateral hip/knee angle+velocity, plus a scalar actuation-delay input) to
 * four normalized torque commands in (-1, 1) through three 64-unit ReLU
 * layers and a tanh output.
 */

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "series.hpp"
#include "trial.hpp"

namespace exotorq {

inline constexpr double kWorkingRateHz = 100.0;
inline constexpr int kHistorySteps = 4;
inline constexpr int kFeatureCount = kHistorySteps * kJointCount * 2 + 1; // 33
inline constexpr double kDefaultDelayFeatureS = 0.025;
inline constexpr double kDefaultTauMaxNm = 50.0;

/// Frozen input layout. Models carry this tag; inference refuses a mismatch.
inline constexpr const char* kFeatureOrderTag =
    "hist4(oldest-first):hip_l,hip_r,knee_l,knee_r:angle,vel;delay@32;v1";

inline const std::vector<int> kPolicyLayerDims = {kFeatureCount, 64, 64, 64,
                                                  static_cast<int>(kJointCount)};

using FeatureWindow = std::array<double, kFeatureCount>;

struct TrainSample {
    FeatureWindow input{};
    std::array<double, kJointCount> target{}; ///< normalized, clipped to [-1, 1]
};

struct TorqueModel {
    std::vector<int> layer_dims = kPolicyLayerDims;
    std::vector<Eigen::MatrixXd> weights; ///< weights[l] is (dims[l+1] x dims[l])
    std::vector<Eigen::VectorXd> biases;
    Eigen::VectorXd norm_mean; ///< per-feature standardization, persisted with the model
    Eigen::VectorXd norm_std;  ///< entries > 0 (constant features floored at 1e-6)
    std::string feature_order_tag = kFeatureOrderTag;
    double tau_max_nm = kDefaultTauMaxNm;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    /// Throws DimensionMismatch / InvalidArgument on inconsistent shapes.
    void validate() const;
};

/// Zero weights and biases, identity normalization. Output is exactly zero.
TorqueModel zero_model(const std::vector<int>& dims);

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases; the draw
/// order is fixed so a seed pins the full parameter set.
TorqueModel init_model(const std::vector<int>& dims, Rng& rng);

/// One window per time index i >= 3 over steps i-3..i, oldest first; feature
/// 32 is the delay input. Requires a 100 Hz trial with velocities.
std::vector<FeatureWindow> build_windows(const Trial& trial, double delay_s);

std::array<double, kJointCount> forward(const TorqueModel& model, const FeatureWindow& window);

/// Columns are samples: inputs is (input_dim x B), result (output_dim x B).
Eigen::MatrixXd forward_batch(const TorqueModel& model, const Eigen::MatrixXd& inputs);

/// Model outputs for every window of the trial, one normalized-torque series
/// per joint. Series start at the first fully covered sample, i.e. trial
/// index kHistorySteps - 1; their length is trial.size() - kHistorySteps + 1.
std::array<UniformSeries, kJointCount> infer_trial(const TorqueModel& model, const Trial& trial,
                                                   double delay_feature_s);

/// Mean over the batch of ||target - output||^2 + w_reg * ||output||^2.
double loss(const TorqueModel& model, const std::vector<TrainSample>& batch, double w_reg);
double loss_on(const TorqueModel& model, const Eigen::MatrixXd& inputs,
               const Eigen::MatrixXd& targets, double w_reg);

struct Gradients {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;
};

/// Exact analytic gradient of loss() w.r.t. every weight and bias.
Gradients grad(const TorqueModel& model, const std::vector<TrainSample>& batch, double w_reg);
Gradients grad_on(const TorqueModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, double w_reg);

struct TrainConfig {
    double w_reg = 0.01;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr double kMomentum = 0.9;

struct TrainResult {
    TorqueModel model;
    double initial_loss = 0.0;        ///< full-set loss before the first update
    std::vector<double> loss_history; ///< full-set loss after each epoch; length == epochs
};

/// Mini-batch gradient descent with momentum 0.9. Input standardization is
/// computed from the training set before optimization. Deterministic given
/// the seed: fixed init, fixed shuffle order, sequential accumulation.
TrainResult train(const std::vector<TrainSample>& samples, const TrainConfig& cfg);

/// Model file: JSON envelope with the weights+biases serialized row-major as
/// little-endian float64, base64 encoded, CRC-32 over the decoded payload.
void save_model(const TorqueModel& model, const std::string& path);

/// `allow_any_dims` lifts the fixed-architecture check (for experiments);
/// everything else is always verified.
TorqueModel load_model(const std::string& path, bool allow_any_dims = false);

/// Checksum of the serialized parameter payload; used in provenance headers.
unsigned long model_payload_crc(const TorqueModel& model);

} // namespace exotorq
