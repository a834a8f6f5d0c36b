#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/series.hpp"
#include "test_util.hpp"

using namespace exotorq;
using testutil::thrown_code;

namespace {

UniformSeries make_series(double rate, std::vector<double> values, double start = 0.0) {
    UniformSeries s;
    s.rate_hz = rate;
    s.start_s = start;
    s.values = std::move(values);
    return s;
}

} // namespace

TEST_CASE("resample at equal rates is the identity") {
    const auto src = make_series(100.0, {0.3, -1.2, 4.5, 0.0, 7.75}, 2.0);
    const auto out = resample(src, 100.0);
    CHECK(out.rate_hz == src.rate_hz);
    CHECK(out.start_s == src.start_s);
    REQUIRE(out.values.size() == src.values.size());
    for (std::size_t i = 0; i < src.values.size(); ++i) {
        CHECK(out.values[i] == src.values[i]); // bit-exact
    }
}

TEST_CASE("resample 200 to 100 Hz keeps every second sample") {
    const auto src = make_series(200.0, {0.0, 1.0, 0.0, 1.0, 0.0});
    const auto out = resample(src, 100.0);
    CHECK(out.rate_hz == 100.0);
    REQUIRE(out.values.size() == 3);
    CHECK(out.values[0] == 0.0);
    CHECK(out.values[1] == 0.0);
    CHECK(out.values[2] == 0.0);
}

TEST_CASE("resample is exact on affine signals") {
    // y = 2t + 3 sampled at 240 Hz, resampled to 100 Hz.
    UniformSeries src;
    src.rate_hz = 240.0;
    src.start_s = 0.0;
    for (int i = 0; i < 241; ++i) {
        const double t = i / 240.0;
        src.values.push_back(2.0 * t + 3.0);
    }
    const auto out = resample(src, 100.0);
    REQUIRE(out.values.size() == 101); // floor(240 * 100/240) + 1
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        const double t = static_cast<double>(j) / 100.0;
        CHECK(out.values[j] == doctest::Approx(2.0 * t + 3.0).epsilon(1e-12));
    }
    // Upsampling an affine signal is exact as well.
    const auto up = resample(out, 400.0);
    for (std::size_t j = 0; j < up.values.size(); ++j) {
        const double t = static_cast<double>(j) / 400.0;
        CHECK(up.values[j] == doctest::Approx(2.0 * t + 3.0).epsilon(1e-12));
    }
}

TEST_CASE("resample output length never passes the source endpoint") {
    const auto src = make_series(200.0, std::vector<double>(7, 1.0)); // spans 0.03 s
    const auto out = resample(src, 100.0);
    // floor(6 * 0.5 + eps) + 1 = 4 samples, last at t = 0.03
    CHECK(out.values.size() == 4);
    CHECK(out.time_at(out.values.size() - 1) <= src.end_s() + 1e-12);
}

TEST_CASE("resample rejects short or invalid input") {
    CHECK(thrown_code([] { resample(make_series(100.0, {1.0}), 50.0); }) == Err::TooShort);
    CHECK(thrown_code([] { resample(make_series(100.0, {1.0, 2.0}), 0.0); }) ==
          Err::InvalidArgument);
    CHECK(thrown_code([] { resample(make_series(100.0, {1.0, 2.0}), -5.0); }) ==
          Err::InvalidArgument);
}

TEST_CASE("central_diff of a constant is zero") {
    const auto out = central_diff(make_series(100.0, std::vector<double>(50, 3.25)));
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("central_diff recovers a linear slope exactly") {
    // theta_i = 0.01 * i at 100 Hz, i.e. d(theta)/dt = 1 rad/s everywhere.
    UniformSeries src;
    src.rate_hz = 100.0;
    for (int i = 0; i < 200; ++i) src.values.push_back(0.01 * i);
    const auto out = central_diff(src);
    REQUIRE(out.values.size() == src.values.size());
    for (double v : out.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("central_diff approximates a sinusoid derivative") {
    const double omega = 2.0 * M_PI;
    UniformSeries src;
    src.rate_hz = 100.0;
    for (int i = 0; i <= 1000; ++i) src.values.push_back(std::sin(omega * i / 100.0));
    const auto out = central_diff(src);
    double max_err = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double truth = omega * std::cos(omega * static_cast<double>(i) / 100.0);
        max_err = std::max(max_err, std::abs(out.values[i] - truth));
    }
    CHECK(max_err < 0.02 * omega);
}

TEST_CASE("central_diff interior error is second order in the step") {
    const double omega = 2.0 * M_PI;
    auto interior_err = [&](double rate) {
        UniformSeries src;
        src.rate_hz = rate;
        const auto n = static_cast<int>(rate * 10.0) + 1;
        for (int i = 0; i < n; ++i) src.values.push_back(std::sin(omega * i / rate));
        const auto out = central_diff(src);
        double max_err = 0.0;
        for (std::size_t i = 1; i + 1 < out.values.size(); ++i) {
            const double truth = omega * std::cos(omega * static_cast<double>(i) / rate);
            max_err = std::max(max_err, std::abs(out.values[i] - truth));
        }
        return max_err;
    };
    const double e100 = interior_err(100.0);
    const double e200 = interior_err(200.0);
    CHECK(e100 / e200 > 3.5); // halving h divides the error by ~4
    CHECK(e100 / e200 < 4.5);
}

TEST_CASE("central_diff needs at least three samples") {
    CHECK(thrown_code([] { central_diff(make_series(100.0, {1.0, 2.0})); }) == Err::TooShort);
}

TEST_CASE("normalize_clip_torque scales and clips") {
    CHECK(normalize_clip_torque(25.0, 50.0) == 0.5);
    CHECK(normalize_clip_torque(100.0, 50.0) == 1.0);
    CHECK(normalize_clip_torque(-100.0, 50.0) == -1.0);
    CHECK(normalize_clip_torque(0.0, 50.0) == 0.0);
}

TEST_CASE("normalize_clip_torque is odd") {
    for (double tau : {0.1, 7.5, 49.9, 50.0, 123.4}) {
        CHECK(normalize_clip_torque(-tau, 50.0) == -normalize_clip_torque(tau, 50.0));
    }
}

TEST_CASE("normalize_clip_torque rejects a non-positive limit") {
    CHECK(thrown_code([] { normalize_clip_torque(1.0, 0.0); }) == Err::NonPositiveMax);
    CHECK(thrown_code([] { normalize_clip_torque(1.0, -50.0); }) == Err::NonPositiveMax);
}

TEST_CASE("delay_shift of zero is the identity") {
    const auto src = make_series(100.0, {0.5, -0.25, 1.5, 2.0});
    const auto out = delay_shift(src, 0.0);
    CHECK(out.trim_count == 0);
    REQUIRE(out.series.values.size() == src.values.size());
    for (std::size_t i = 0; i < src.values.size(); ++i) {
        CHECK(out.series.values[i] == src.values[i]);
    }
}

TEST_CASE("delay_shift rounds 100 ms at 100 Hz to 10 samples") {
    UniformSeries src;
    src.rate_hz = 100.0;
    for (int i = 0; i < 50; ++i) src.values.push_back(static_cast<double>(i));
    const auto out = delay_shift(src, 0.1);
    CHECK(out.trim_count == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(out.series.values[i] == src.values[0]);
    for (std::size_t i = 10; i < src.values.size(); ++i) {
        CHECK(out.series.values[i] == src.values[i - 10]);
    }
}

TEST_CASE("delay_shift on a ramp subtracts the delay") {
    // y(t) = t at 100 Hz; a 50 ms shift gives y(t - 0.05) past the gap.
    UniformSeries src;
    src.rate_hz = 100.0;
    for (int i = 0; i < 100; ++i) src.values.push_back(i / 100.0);
    const auto out = delay_shift(src, 0.05);
    CHECK(out.trim_count == 5);
    for (std::size_t i = 5; i < src.values.size(); ++i) {
        const double t = static_cast<double>(i) / 100.0;
        CHECK(out.series.values[i] == doctest::Approx(t - 0.05).epsilon(1e-12));
    }
}

TEST_CASE("delay_shift composes additively") {
    UniformSeries src;
    src.rate_hz = 100.0;
    for (int i = 0; i < 80; ++i) src.values.push_back(std::sin(0.17 * i));
    const auto once = delay_shift(src, 0.07);
    const auto twice = delay_shift(once.series, 0.03);
    const auto direct = delay_shift(src, 0.10);
    const std::size_t skip = once.trim_count + twice.trim_count;
    CHECK(skip == direct.trim_count);
    for (std::size_t i = skip; i < src.values.size(); ++i) {
        CHECK(twice.series.values[i] == direct.series.values[i]);
    }
}

TEST_CASE("delay_shift refuses a delay past the series end") {
    const auto src = make_series(100.0, {1.0, 2.0, 3.0});
    CHECK(thrown_code([&] { (void)delay_shift(src, 0.03); }) == Err::DelayExceedsSeries);
    CHECK(thrown_code([&] { (void)delay_shift(src, 1.0); }) == Err::DelayExceedsSeries);
    CHECK(thrown_code([&] { (void)delay_shift(src, -0.01); }) == Err::InvalidArgument);
}
