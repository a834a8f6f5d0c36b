/**
 * @file synth.hpp
 * @brief Synthetic gait generator with an analytically known
 *        kinematics-to-torque mapping, used as the ground-truth oracle.
 *
 * Angles are two-harmonic periodic signals, velocities their exact
 * derivatives, and GT moments follow a linear-with-delay map
 *   tau_j(t) = sum_k c_jk * theta_k(t - delta) + d_jk * omega_k(t - delta)
 * evaluated in closed form (periodic extension for t - delta < 0), plus
 * optional seeded Gaussian noise.
 */

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "trial.hpp"

namespace exotorq {

struct JointHarmonics {
    double mean = 0.0;
    double a1 = 0.0, phi1 = 0.0; ///< fundamental (one cycle per stride)
    double a2 = 0.0, phi2 = 0.0; ///< second harmonic
};

using Gain4x4 = std::array<std::array<double, kJointCount>, kJointCount>;

struct TorqueMap {
    Gain4x4 angle_gain{};    ///< c_jk, Nm/kg per rad
    Gain4x4 velocity_gain{}; ///< d_jk, Nm/kg per rad/s
    double delay_s = 0.0;    ///< built-in delta >= 0
};

struct SynthSpec {
    std::string subject_id = "synth01";
    Condition condition = Condition::level(1.25);
    double stride_s = 1.2;
    std::size_t n_strides = 10;
    double sample_rate_hz = 100.0;
    double body_mass_kg = 70.0;
    std::array<JointHarmonics, kJointCount> harmonics{};
    TorqueMap torque_map{};
    double noise_sd = 0.0; ///< SD of Gaussian noise added to GT moments
    std::uint64_t seed = 1;

    double duration_s() const { return stride_s * double(n_strides); }
    /// Throws InvalidSpec on any violated invariant.
    void validate() const;
};

/// Defaults: gait-like harmonics (contralateral legs half a stride apart),
/// mostly diagonal torque map with hip extension negative / knee flexion
/// positive, no noise, no built-in delay.
SynthSpec default_synth_spec();

/// Amplitude multiplier derived from the walking condition, so different
/// conditions produce genuinely different signals.
double condition_amplitude_scale(const Condition& c);

double synth_angle(const SynthSpec& spec, std::size_t joint, double t);
double synth_velocity(const SynthSpec& spec, std::size_t joint, double t);

/// Closed-form torque map at time t (noise-free). t must lie in [0, duration].
std::array<double, kJointCount> oracle_torque(const SynthSpec& spec, double t);

/// Samples the spec into a canonical trial with velocities and GT moments.
/// Bit-identical for identical specs.
Trial generate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const std::string& json_text);
std::string synth_spec_to_json(const SynthSpec& spec);

} // namespace exotorq
