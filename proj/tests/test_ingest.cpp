#include <doctest.h>

#include <cmath>
#include <string>

#include "core/textio.hpp"
#include "core/trial.hpp"
#include "test_util.hpp"

using namespace exotorq;
using testutil::TempDir;
using testutil::thrown_code;
using testutil::write_file;

namespace {

std::string sidecar_json(const std::string& subject, double rate,
                         const std::string& extra = "") {
    return "{\"subject_id\":\"" + subject +
           "\",\"condition\":{\"kind\":\"level_ground\",\"speed_mps\":1.2},"
           "\"sample_rate_hz\":" + fmt_g17(rate) + ",\"body_mass_kg\":70" + extra + "}\n";
}

// Four rows of constant kinematics at 200 Hz, angles only.
void write_minimal_trial(const TempDir& dir, const std::string& stem,
                         const std::string& subject = "s01") {
    write_file(dir.file(stem + ".csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,0.5,0.4,0.3,0.2\n"
               "0.005,0.5,0.4,0.3,0.2\n"
               "0.01,0.5,0.4,0.3,0.2\n"
               "0.015,0.5,0.4,0.3,0.2\n");
    write_file(dir.file(stem + ".json"), sidecar_json(subject, 200.0));
}

Trial build_rich_trial() {
    Trial t;
    t.subject_id = "s07";
    t.condition = Condition::ramp(-5.0);
    t.sample_rate_hz = 100.0;
    t.body_mass_kg = 68.4;
    ChannelSet vel;
    ChannelSet mom;
    for (int i = 0; i < 40; ++i) {
        t.time_s.push_back(i / 100.0);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            const double phase = 0.31 * static_cast<double>(j + 1);
            t.angles_rad[j].push_back(std::sin(0.17 * i + phase));
            vel[j].push_back(std::cos(0.17 * i + phase) * 17.0);
            mom[j].push_back(0.3 * std::sin(0.17 * i - phase));
        }
    }
    t.velocities_rad_s = vel;
    t.gt_moments_nm_per_kg = mom;
    return t;
}

} // namespace

TEST_CASE("minimal canonical trial loads with angles only") {
    TempDir dir;
    write_minimal_trial(dir, "a");
    const Trial t = load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical());
    CHECK(t.subject_id == "s01");
    CHECK(t.condition.key() == "level_1.2");
    CHECK(t.sample_rate_hz == 200.0);
    REQUIRE(t.size() == 4);
    CHECK(t.angles_rad[0][0] == 0.5);
    CHECK(t.angles_rad[3][3] == 0.2);
    CHECK(t.body_mass_kg == 70.0);
    // The loader never fabricates derived channels.
    CHECK_FALSE(t.velocities_rad_s.has_value());
    CHECK_FALSE(t.gt_moments_nm_per_kg.has_value());
}

TEST_CASE("repeated timestamps are rejected as non-monotone") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,0,0,0,0\n"
               "0.005,0,0,0,0\n"
               "0.005,0,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 200.0));
    CHECK(thrown_code([&] { load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical()); }) ==
          Err::NonMonotoneTime);
}

TEST_CASE("time jitter beyond one percent of the period is rejected") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,0,0,0,0\n"
               "0.005,0,0,0,0\n"
               "0.0102,0,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 200.0));
    CHECK(thrown_code([&] { load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical()); }) ==
          Err::IrregularSampling);
}

TEST_CASE("degree sources convert to radians") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,90,0,0,0\n"
               "0.01,90,0,0,0\n"
               "0.02,90,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 100.0, ",\"angle_unit\":\"deg\""));
    const Trial t = load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical());
    CHECK(t.angles_rad[0][0] == doctest::Approx(1.5707963267948966).epsilon(1e-15));
    CHECK(t.angle_unit == "rad"); // storage unit after conversion
}

TEST_CASE("sidecar angle_unit overrides the column map") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,180,0,0,0\n"
               "0.01,180,0,0,0\n"
               "0.02,180,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 100.0, ",\"angle_unit\":\"deg\""));
    ColumnMap map = ColumnMap::canonical();
    map.angle_unit = "rad"; // sidecar says deg and must win
    const Trial t = load_canonical_csv(dir.file("a.csv"), map);
    CHECK(t.angles_rad[0][0] == doctest::Approx(3.141592653589793).epsilon(1e-15));
}

TEST_CASE("angle_sign flips angles and velocities but not moments") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad,"
               "hip_l_vel,hip_r_vel,knee_l_vel,knee_r_vel,"
               "hip_l_mom,hip_r_mom,knee_l_mom,knee_r_mom\n"
               "0,0.5,0.5,0.5,0.5,2,2,2,2,0.3,0.3,0.3,0.3\n"
               "0.01,0.5,0.5,0.5,0.5,2,2,2,2,0.3,0.3,0.3,0.3\n"
               "0.02,0.5,0.5,0.5,0.5,2,2,2,2,0.3,0.3,0.3,0.3\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 100.0));
    ColumnMap map = ColumnMap::canonical();
    map.angle_sign = {-1.0, 1.0, 1.0, 1.0};
    const Trial t = load_canonical_csv(dir.file("a.csv"), map);
    CHECK(t.angles_rad[0][0] == -0.5);
    CHECK(t.angles_rad[1][0] == 0.5);
    REQUIRE(t.velocities_rad_s.has_value());
    CHECK((*t.velocities_rad_s)[0][0] == -2.0);
    CHECK((*t.velocities_rad_s)[1][0] == 2.0);
    REQUIRE(t.gt_moments_nm_per_kg.has_value());
    CHECK((*t.gt_moments_nm_per_kg)[0][0] == 0.3);
}

TEST_CASE("a missing required column is a hard error") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad\n"
               "0,0,0,0\n"
               "0.01,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 100.0));
    CHECK(thrown_code([&] { load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical()); }) ==
          Err::MissingColumn);
}

TEST_CASE("non-numeric cells are rejected") {
    TempDir dir;
    write_file(dir.file("a.csv"),
               "time_s,hip_l_rad,hip_r_rad,knee_l_rad,knee_r_rad\n"
               "0,0,0,0,0\n"
               "0.01,nope,0,0,0\n"
               "0.02,0,0,0,0\n");
    write_file(dir.file("a.json"), sidecar_json("s01", 100.0));
    CHECK(thrown_code([&] { load_canonical_csv(dir.file("a.csv"), ColumnMap::canonical()); }) ==
          Err::NonFiniteSample);
}

TEST_CASE("write then load round-trips bit-exactly") {
    TempDir dir;
    const Trial original = build_rich_trial();
    write_canonical_csv(original, dir.file("t.csv"));
    const Trial loaded = load_canonical_csv(dir.file("t.csv"), ColumnMap::canonical());

    CHECK(loaded.subject_id == original.subject_id);
    CHECK(loaded.condition == original.condition);
    CHECK(loaded.sample_rate_hz == original.sample_rate_hz);
    CHECK(*loaded.body_mass_kg == *original.body_mass_kg);
    REQUIRE(loaded.size() == original.size());
    REQUIRE(loaded.velocities_rad_s.has_value());
    REQUIRE(loaded.gt_moments_nm_per_kg.has_value());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(loaded.time_s[i] == original.time_s[i]);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            CHECK(loaded.angles_rad[j][i] == original.angles_rad[j][i]);
            CHECK((*loaded.velocities_rad_s)[j][i] == (*original.velocities_rad_s)[j][i]);
            CHECK((*loaded.gt_moments_nm_per_kg)[j][i] ==
                  (*original.gt_moments_nm_per_kg)[j][i]);
        }
    }
}

TEST_CASE("writing the same trial twice produces identical bytes") {
    TempDir dir;
    const Trial t = build_rich_trial();
    write_canonical_csv(t, dir.file("a.csv"));
    write_canonical_csv(t, dir.file("b.csv"));
    CHECK(testutil::read_file(dir.file("a.csv")) == testutil::read_file(dir.file("b.csv")));
}

TEST_CASE("catalog keeps valid files and reports broken ones") {
    TempDir dir;
    write_minimal_trial(dir, "good", "s01");
    write_file(dir.file("bad.csv"), "time_s,hip_l_rad\n0,0\n");
    write_file(dir.file("bad.json"), sidecar_json("s02", 100.0));
    const CatalogResult result = catalog_directory(dir.path.string(), ColumnMap::canonical());
    CHECK(result.catalog.trials.size() == 1);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].code == Err::MissingColumn);
    CHECK(result.catalog.provenance.count("s01/level_1.2") == 1);
}

TEST_CASE("two files with the same subject and condition collide") {
    TempDir dir;
    write_minimal_trial(dir, "a", "s01");
    write_minimal_trial(dir, "b", "s01");
    CHECK(thrown_code([&] { catalog_directory(dir.path.string(), ColumnMap::canonical()); }) ==
          Err::DuplicateTrialKey);
}

TEST_CASE("a directory with nothing loadable is an empty catalog") {
    TempDir dir;
    CHECK(thrown_code([&] { catalog_directory(dir.path.string(), ColumnMap::canonical()); }) ==
          Err::EmptyCatalog);
    write_file(dir.file("only_bad.csv"), "not,a,trial\n");
    write_file(dir.file("only_bad.json"), sidecar_json("s01", 100.0));
    CHECK(thrown_code([&] { catalog_directory(dir.path.string(), ColumnMap::canonical()); }) ==
          Err::EmptyCatalog);
}

TEST_CASE("parallel cataloging matches sequential") {
    TempDir dir;
    for (int i = 0; i < 6; ++i) {
        write_minimal_trial(dir, "t" + std::to_string(i), "s0" + std::to_string(i));
    }
    const auto seq = catalog_directory(dir.path.string(), ColumnMap::canonical(), 1);
    const auto par = catalog_directory(dir.path.string(), ColumnMap::canonical(), 4);
    REQUIRE(seq.catalog.trials.size() == par.catalog.trials.size());
    for (std::size_t i = 0; i < seq.catalog.trials.size(); ++i) {
        CHECK(seq.catalog.trials[i].subject_id == par.catalog.trials[i].subject_id);
    }
}

TEST_CASE("column map JSON round-trips") {
    ColumnMap m;
    m.time_col = "t";
    m.angle_cols = {"ha", "hb", "ka", "kb"};
    m.velocity_cols = {{"va", "vb", "vc", "vd"}};
    m.angle_unit = "deg";
    m.angle_sign = {1.0, -1.0, 1.0, -1.0};
    const ColumnMap r = ColumnMap::from_json(m.to_json());
    CHECK(r.time_col == "t");
    CHECK(r.angle_cols[2] == "ka");
    REQUIRE(r.velocity_cols.has_value());
    CHECK((*r.velocity_cols)[3] == "vd");
    CHECK_FALSE(r.moment_cols.has_value());
    CHECK(r.angle_unit == "deg");
    CHECK(r.angle_sign[1] == -1.0);
    CHECK(thrown_code([] { ColumnMap::from_json("{\"angle_unit\":\"turns\"}"); }) == Err::Parse);
}

TEST_CASE("condition keys and environments are stable") {
    CHECK(Condition::level(1.2).key() == "level_1.2");
    CHECK(Condition::ramp(5.0).key() == "ramp_+5");
    CHECK(Condition::ramp(-10.0).key() == "ramp_-10");
    CHECK(Condition::level(0.75).environment() == "level");
    CHECK(Condition::ramp(12.4).environment() == "incline");
    CHECK(Condition::ramp(-7.8).environment() == "decline");
    CHECK(trial_key("s01", Condition::ramp(5.0)) == "s01/ramp_+5");
}
