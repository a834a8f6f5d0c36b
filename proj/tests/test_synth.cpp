#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/gait.hpp"
#include "core/series.hpp"
#include "core/synth.hpp"
#include "test_util.hpp"

using namespace exotorq;
using testutil::thrown_code;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SynthSpec identity_angle_spec() {
    SynthSpec s = default_synth_spec();
    s.torque_map = TorqueMap{};
    for (std::size_t j = 0; j < kJointCount; ++j) s.torque_map.angle_gain[j][j] = 1.0;
    return s;
}

UniformSeries channel_series(const Trial& t, const std::vector<double>& values) {
    UniformSeries s;
    s.rate_hz = t.sample_rate_hz;
    s.start_s = t.time_s.front();
    s.values = values;
    return s;
}

} // namespace

TEST_CASE("identity angle map reproduces the angles as moments") {
    const SynthSpec spec = identity_angle_spec();
    const Trial t = generate(spec);
    REQUIRE(t.gt_moments_nm_per_kg.has_value());
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK((*t.gt_moments_nm_per_kg)[j][i] == t.angles_rad[j][i]); // bit-identical
        }
    }
}

TEST_CASE("a zero torque map produces zero moments") {
    SynthSpec spec = default_synth_spec();
    spec.torque_map = TorqueMap{};
    const Trial t = generate(spec);
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (double v : (*t.gt_moments_nm_per_kg)[j]) CHECK(v == 0.0);
    }
}

TEST_CASE("the default spec spans ten strides at 100 Hz") {
    const SynthSpec spec = default_synth_spec();
    const Trial t = generate(spec);
    CHECK(t.size() == 1200);
    CHECK(t.sample_rate_hz == 100.0);
    CHECK(t.subject_id == "synth01");
    CHECK(*t.body_mass_kg == 70.0);
    REQUIRE(t.velocities_rad_s.has_value());
    REQUIRE(t.gt_moments_nm_per_kg.has_value());
}

TEST_CASE("generated gait segments into roughly one cycle per stride") {
    const Trial t = generate(default_synth_spec());
    const auto hip = channel_series(t, t.angles_rad[0]);
    const Segmentation seg = segment_cycles(hip, SegmentConfig{});
    CHECK(seg.anchors.size() >= 8);
    CHECK(seg.anchors.size() <= 10);
    CHECK(seg.cycles.size() >= 7);
    CHECK(seg.cycles.size() <= 9);
    for (const auto& [a, b] : seg.cycles) {
        CHECK(b - a >= 119);
        CHECK(b - a <= 121); // strides repeat every 1.2 s
    }
}

TEST_CASE("generation is bit-identical for a fixed seed") {
    SynthSpec spec = default_synth_spec();
    spec.noise_sd = 0.05;
    spec.seed = 77;
    const Trial a = generate(spec);
    const Trial b = generate(spec);
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK((*a.gt_moments_nm_per_kg)[j][i] == (*b.gt_moments_nm_per_kg)[j][i]);
        }
    }
    spec.seed = 78;
    const Trial c = generate(spec);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i) {
        any_diff = (*a.gt_moments_nm_per_kg)[0][i] != (*c.gt_moments_nm_per_kg)[0][i];
    }
    CHECK(any_diff);
}

TEST_CASE("noise leaves the kinematics untouched") {
    SynthSpec clean = default_synth_spec();
    SynthSpec noisy = clean;
    noisy.noise_sd = 0.1;
    const Trial a = generate(clean);
    const Trial b = generate(noisy);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.angles_rad[2][i] == b.angles_rad[2][i]);
        CHECK((*a.velocities_rad_s)[2][i] == (*b.velocities_rad_s)[2][i]);
    }
}

TEST_CASE("oracle torque applies the built-in delay in closed form") {
    // Single-harmonic hip, pure velocity map with gain 2 and a 50 ms delay:
    // tau_0(t) = 2 * w * cos(w (t - 0.05)).
    SynthSpec spec = default_synth_spec();
    spec.condition = Condition::level(1.25); // amplitude scale 1
    for (auto& h : spec.harmonics) h = JointHarmonics{};
    spec.harmonics[0] = {0.0, 1.0, 0.0, 0.0, 0.0};
    spec.torque_map = TorqueMap{};
    spec.torque_map.velocity_gain[0][0] = 2.0;
    spec.torque_map.delay_s = 0.05;

    const double w = kTwoPi / spec.stride_s;
    for (double t : {0.0, 0.3, 1.0}) {
        const auto tau = oracle_torque(spec, t);
        CHECK(tau[0] == doctest::Approx(2.0 * w * std::cos(w * (t - 0.05))).epsilon(1e-12));
        CHECK(tau[1] == 0.0);
        CHECK(tau[2] == 0.0);
        CHECK(tau[3] == 0.0);
    }
}

TEST_CASE("oracle torque accepts only the trial span") {
    const SynthSpec spec = default_synth_spec();
    CHECK(thrown_code([&] { oracle_torque(spec, -0.1); }) == Err::OutOfRange);
    CHECK(thrown_code([&] { oracle_torque(spec, spec.duration_s() + 0.01); }) ==
          Err::OutOfRange);
    CHECK(oracle_torque(spec, 0.0).size() == kJointCount);
    CHECK(oracle_torque(spec, spec.duration_s()).size() == kJointCount);
}

TEST_CASE("generated moments match the oracle at the sample times") {
    const SynthSpec spec = default_synth_spec();
    const Trial t = generate(spec);
    for (std::size_t i = 0; i < t.size(); i += 97) {
        const auto tau = oracle_torque(spec, t.time_s[i]);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            CHECK((*t.gt_moments_nm_per_kg)[j][i] == tau[j]);
        }
    }
}

TEST_CASE("stored velocities are the analytic derivative of the angles") {
    const Trial t = generate(default_synth_spec());
    const auto hip = channel_series(t, t.angles_rad[0]);
    const UniformSeries cd = central_diff(hip);
    // Central differencing carries O(h^2) truncation error; the stored
    // velocity channel is exact, so the two agree to within that bound.
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        CHECK(std::abs(cd.values[i] - (*t.velocities_rad_s)[0][i]) < 5e-3);
    }
}

TEST_CASE("contralateral joints repeat half a stride later") {
    const SynthSpec spec = default_synth_spec();
    const double half = 0.5 * spec.stride_s;
    for (double t : {0.0, 0.25, 0.7, 1.1}) {
        CHECK(synth_angle(spec, 1, t) ==
              doctest::Approx(synth_angle(spec, 0, t + half)).epsilon(1e-9));
        CHECK(synth_angle(spec, 3, t) ==
              doctest::Approx(synth_angle(spec, 2, t + half)).epsilon(1e-9));
    }
}

TEST_CASE("walking condition scales the signal amplitude") {
    CHECK(condition_amplitude_scale(Condition::level(1.25)) == 1.0);
    CHECK(condition_amplitude_scale(Condition::level(2.5)) == 2.0);
    CHECK(condition_amplitude_scale(Condition::ramp(5.0)) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(condition_amplitude_scale(Condition::ramp(-5.0)) ==
          doctest::Approx(0.9).epsilon(1e-15));

    SynthSpec slow = default_synth_spec();
    slow.condition = Condition::level(1.25);
    SynthSpec fast = slow;
    fast.condition = Condition::level(2.5);
    const Trial a = generate(slow);
    const Trial b = generate(fast);
    for (std::size_t i = 0; i < a.size(); i += 131) {
        CHECK(b.angles_rad[0][i] == 2.0 * a.angles_rad[0][i]);
    }
}

TEST_CASE("invalid specs are refused") {
    SynthSpec s = default_synth_spec();
    s.stride_s = -1.0;
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
    s = default_synth_spec();
    s.n_strides = 0;
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
    s = default_synth_spec();
    s.body_mass_kg = 0.0;
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
    s = default_synth_spec();
    s.noise_sd = -0.1;
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
    s = default_synth_spec();
    s.subject_id.clear();
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
    s = default_synth_spec();
    s.torque_map.delay_s = -0.05;
    CHECK(thrown_code([&] { generate(s); }) == Err::InvalidSpec);
}

TEST_CASE("spec JSON round-trips every field") {
    SynthSpec s = default_synth_spec();
    s.subject_id = "rt01";
    s.condition = Condition::ramp(-7.5);
    s.stride_s = 1.15;
    s.n_strides = 12;
    s.body_mass_kg = 81.25;
    s.harmonics[2].a2 = 0.31;
    s.torque_map.angle_gain[1][2] = 0.125;
    s.torque_map.delay_s = 0.075;
    s.noise_sd = 0.02;
    s.seed = 12345;

    const SynthSpec r = synth_spec_from_json(synth_spec_to_json(s));
    CHECK(r.subject_id == "rt01");
    CHECK(r.condition == s.condition);
    CHECK(r.stride_s == s.stride_s);
    CHECK(r.n_strides == s.n_strides);
    CHECK(r.body_mass_kg == s.body_mass_kg);
    CHECK(r.harmonics[2].a2 == s.harmonics[2].a2);
    CHECK(r.harmonics[0].a1 == s.harmonics[0].a1);
    CHECK(r.torque_map.angle_gain[1][2] == 0.125);
    CHECK(r.torque_map.delay_s == 0.075);
    CHECK(r.noise_sd == 0.02);
    CHECK(r.seed == 12345);

    const Trial ta = generate(s);
    const Trial tb = generate(r);
    for (std::size_t i = 0; i < ta.size(); i += 59) {
        CHECK(ta.angles_rad[1][i] == tb.angles_rad[1][i]);
        CHECK((*ta.gt_moments_nm_per_kg)[1][i] == (*tb.gt_moments_nm_per_kg)[1][i]);
    }
}

TEST_CASE("unknown spec keys are rejected at every level") {
    CHECK(thrown_code([] { synth_spec_from_json("{\"bogus\": 1}"); }) == Err::Parse);
    CHECK(thrown_code([] {
              synth_spec_from_json("{\"harmonics\": {\"hip_l\": {\"a3\": 1.0}}}");
          }) == Err::Parse);
    CHECK(thrown_code([] {
              synth_spec_from_json("{\"torque_map\": {\"gain\": []}}");
          }) == Err::Parse);
    CHECK(thrown_code([] { synth_spec_from_json("{\"stride_s\": -2}"); }) == Err::InvalidSpec);
    CHECK(thrown_code([] { synth_spec_from_json("not json"); }) == Err::Parse);
}
