/**
 * @file synth.cpp
 */

#include "synth.hpp"

#include <cmath>
#include <numbers>

#include "condition_json.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace exotorq {

using json = nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) fail(Err::InvalidSpec, what);
}

double angle_unscaled(const SynthSpec& spec, std::size_t j, double t) {
    const JointHarmonics& h = spec.harmonics[j];
    const double w = kTwoPi / spec.stride_s;
    return h.mean + h.a1 * std::sin(w * t + h.phi1) + h.a2 * std::sin(2.0 * w * t + h.phi2);
}

double velocity_unscaled(const SynthSpec& spec, std::size_t j, double t) {
    const JointHarmonics& h = spec.harmonics[j];
    const double w = kTwoPi / spec.stride_s;
    return h.a1 * w * std::cos(w * t + h.phi1) + h.a2 * 2.0 * w * std::cos(2.0 * w * t + h.phi2);
}

std::array<double, kJointCount> map_torque(const SynthSpec& spec, double t) {
    const double td = t - spec.torque_map.delay_s;
    std::array<double, kJointCount> tau{};
    for (std::size_t j = 0; j < kJointCount; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kJointCount; ++k) {
            acc += spec.torque_map.angle_gain[j][k] * synth_angle(spec, k, td);
            acc += spec.torque_map.velocity_gain[j][k] * synth_velocity(spec, k, td);
        }
        tau[j] = acc;
    }
    return tau;
}

Gain4x4 gains_from_json(const json& j) {
    if (!j.is_array() || j.size() != kJointCount) fail(Err::Parse, "gain matrix must be 4x4");
    Gain4x4 g{};
    for (std::size_t r = 0; r < kJointCount; ++r) {
        if (!j[r].is_array() || j[r].size() != kJointCount)
            fail(Err::Parse, "gain matrix must be 4x4");
        for (std::size_t c = 0; c < kJointCount; ++c) g[r][c] = j[r][c].get<double>();
    }
    return g;
}

json gains_to_json(const Gain4x4& g) {
    json j = json::array();
    for (const auto& row : g) {
        json r = json::array();
        for (double x : row) r.push_back(x);
        j.push_back(r);
    }
    return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) fail(Err::Parse, where + ": unknown key '" + key + "'");
    }
}

} // namespace

void SynthSpec::validate() const {
    require(std::isfinite(stride_s) && stride_s > 0.0, "stride_s must be positive");
    require(n_strides >= 1, "n_strides must be >= 1");
    require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0,
            "sample_rate_hz must be positive");
    require(std::isfinite(body_mass_kg) && body_mass_kg > 0.0, "body_mass_kg must be positive");
    require(std::isfinite(noise_sd) && noise_sd >= 0.0, "noise_sd must be >= 0");
    require(std::isfinite(torque_map.delay_s) && torque_map.delay_s >= 0.0,
            "torque map delay must be >= 0");
    require(!subject_id.empty(), "subject_id must be non-empty");
    for (const auto& h : harmonics) {
        require(std::isfinite(h.mean) && std::isfinite(h.a1) && std::isfinite(h.phi1) &&
                    std::isfinite(h.a2) && std::isfinite(h.phi2),
                "harmonic parameters must be finite");
    }
    for (const auto& row : torque_map.angle_gain)
        for (double x : row) require(std::isfinite(x), "angle gains must be finite");
    for (const auto& row : torque_map.velocity_gain)
        for (double x : row) require(std::isfinite(x), "velocity gains must be finite");
}

SynthSpec default_synth_spec() {
    SynthSpec s;
    const double pi = std::numbers::pi;
    // Contralateral joints are the same waveform half a stride later, which
    // flips the fundamental's phase by pi and leaves the second harmonic.
    s.harmonics[0] = {0.25, 0.40, 0.0, 0.08, 1.0};      // hip_l
    s.harmonics[1] = {0.25, 0.40, -pi, 0.08, 1.0};      // hip_r
    s.harmonics[2] = {0.55, 0.45, -pi / 3.0, 0.25, 0.8}; // knee_l
    s.harmonics[3] = {0.55, 0.45, -pi / 3.0 - pi, 0.25, 0.8}; // knee_r
    // Hip extensors resist flexion (negative), knee torque follows flexion
    // (positive); light velocity damping keeps power phases distinct.
    for (std::size_t j = 0; j < kJointCount; ++j) {
        s.torque_map.angle_gain[j][j] = j < 2 ? -0.6 : 0.5;
        s.torque_map.velocity_gain[j][j] = j < 2 ? -0.05 : 0.04;
    }
    return s;
}

double condition_amplitude_scale(const Condition& c) {
    if (c.kind == ConditionKind::LevelGround) return c.speed_mps / 1.25;
    return 1.0 + c.grade_deg / 50.0;
}

double synth_angle(const SynthSpec& spec, std::size_t joint, double t) {
    return condition_amplitude_scale(spec.condition) * angle_unscaled(spec, joint, t);
}

double synth_velocity(const SynthSpec& spec, std::size_t joint, double t) {
    return condition_amplitude_scale(spec.condition) * velocity_unscaled(spec, joint, t);
}

std::array<double, kJointCount> oracle_torque(const SynthSpec& spec, double t) {
    if (t < 0.0 || t > spec.duration_s())
        fail(Err::OutOfRange, "t outside the trial span");
    return map_torque(spec, t);
}

Trial generate(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s() * spec.sample_rate_hz));
    require(n >= 2, "spec produces fewer than 2 samples");

    Trial trial;
    trial.subject_id = spec.subject_id;
    trial.condition = spec.condition;
    trial.sample_rate_hz = spec.sample_rate_hz;
    trial.body_mass_kg = spec.body_mass_kg;
    trial.time_s.resize(n);
    for (auto& ch : trial.angles_rad) ch.resize(n);
    trial.velocities_rad_s.emplace();
    for (auto& ch : *trial.velocities_rad_s) ch.resize(n);
    trial.gt_moments_nm_per_kg.emplace();
    for (auto& ch : *trial.gt_moments_nm_per_kg) ch.resize(n);

    Rng rng(spec.seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = double(i) / spec.sample_rate_hz;
        trial.time_s[i] = t;
        for (std::size_t j = 0; j < kJointCount; ++j) {
            trial.angles_rad[j][i] = synth_angle(spec, j, t);
            (*trial.velocities_rad_s)[j][i] = synth_velocity(spec, j, t);
        }
        const auto tau = map_torque(spec, t);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            double v = tau[j];
            if (spec.noise_sd > 0.0) v += spec.noise_sd * rng.gaussian();
            (*trial.gt_moments_nm_per_kg)[j][i] = v;
        }
    }
    trial.validate();
    return trial;
}

SynthSpec synth_spec_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("synth spec: ") + e.what());
    }
    try {
        reject_unknown_keys(j,
                            {"subject_id", "condition", "stride_s", "n_strides", "sample_rate_hz",
                             "body_mass_kg", "harmonics", "torque_map", "noise_sd", "seed"},
                            "synth spec");
        SynthSpec s = default_synth_spec();
        if (j.contains("subject_id")) s.subject_id = j["subject_id"].get<std::string>();
        if (j.contains("condition")) s.condition = condition_from_json(j["condition"]);
        if (j.contains("stride_s")) s.stride_s = j["stride_s"].get<double>();
        if (j.contains("n_strides")) s.n_strides = j["n_strides"].get<std::size_t>();
        if (j.contains("sample_rate_hz")) s.sample_rate_hz = j["sample_rate_hz"].get<double>();
        if (j.contains("body_mass_kg")) s.body_mass_kg = j["body_mass_kg"].get<double>();
        if (j.contains("harmonics")) {
            const json& h = j["harmonics"];
            reject_unknown_keys(h, {"hip_l", "hip_r", "knee_l", "knee_r"}, "harmonics");
            for (std::size_t k = 0; k < kJointCount; ++k) {
                if (!h.contains(kJointNames[k])) continue;
                const json& hj = h[kJointNames[k]];
                reject_unknown_keys(hj, {"mean", "a1", "phi1", "a2", "phi2"}, kJointNames[k]);
                JointHarmonics& out = s.harmonics[k];
                if (hj.contains("mean")) out.mean = hj["mean"].get<double>();
                if (hj.contains("a1")) out.a1 = hj["a1"].get<double>();
                if (hj.contains("phi1")) out.phi1 = hj["phi1"].get<double>();
                if (hj.contains("a2")) out.a2 = hj["a2"].get<double>();
                if (hj.contains("phi2")) out.phi2 = hj["phi2"].get<double>();
            }
        }
        if (j.contains("torque_map")) {
            const json& m = j["torque_map"];
            reject_unknown_keys(m, {"angle_gain", "velocity_gain", "delay_s"}, "torque_map");
            if (m.contains("angle_gain")) s.torque_map.angle_gain = gains_from_json(m["angle_gain"]);
            if (m.contains("velocity_gain"))
                s.torque_map.velocity_gain = gains_from_json(m["velocity_gain"]);
            if (m.contains("delay_s")) s.torque_map.delay_s = m["delay_s"].get<double>();
        }
        if (j.contains("noise_sd")) s.noise_sd = j["noise_sd"].get<double>();
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("synth spec: ") + e.what());
    }
}

std::string synth_spec_to_json(const SynthSpec& spec) {
    json j;
    j["subject_id"] = spec.subject_id;
    j["condition"] = condition_to_json(spec.condition);
    j["stride_s"] = spec.stride_s;
    j["n_strides"] = spec.n_strides;
    j["sample_rate_hz"] = spec.sample_rate_hz;
    j["body_mass_kg"] = spec.body_mass_kg;
    json h;
    for (std::size_t k = 0; k < kJointCount; ++k) {
        const JointHarmonics& jh = spec.harmonics[k];
        h[kJointNames[k]] = {{"mean", jh.mean},
                             {"a1", jh.a1},
                             {"phi1", jh.phi1},
                             {"a2", jh.a2},
                             {"phi2", jh.phi2}};
    }
    j["harmonics"] = h;
    j["torque_map"] = {{"angle_gain", gains_to_json(spec.torque_map.angle_gain)},
                       {"velocity_gain", gains_to_json(spec.torque_map.velocity_gain)},
                       {"delay_s", spec.torque_map.delay_s}};
    j["noise_sd"] = spec.noise_sd;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

} // namespace exotorq
