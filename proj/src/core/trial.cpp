#include "trial.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "condition_json.hpp"
#include "json.hpp"
#include "textio.hpp"

namespace exotorq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string sidecar_path(const std::string& csv_path) {
    fs::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int require_column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& path) {
    const int idx = find_column(header, name);
    if (idx < 0) {
        fail(Err::MissingColumn, path + ": missing column '" + name + "'");
    }
    return idx;
}

void check_finite(const std::vector<double>& v, const std::string& channel) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            fail(Err::NonFiniteSample,
                 "non-finite value in channel '" + channel + "' at row " + std::to_string(i));
        }
    }
}

std::array<std::string, kJointCount> columns_from_json(const json& j) {
    if (!j.is_array() || j.size() != kJointCount) {
        fail(Err::Parse, "column list must have exactly 4 entries");
    }
    std::array<std::string, kJointCount> out;
    for (std::size_t i = 0; i < kJointCount; ++i) out[i] = j[i].get<std::string>();
    return out;
}

} // namespace

Condition condition_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "level_ground") {
        return Condition::level(j.at("speed_mps").get<double>());
    }
    if (kind == "ramp") {
        return Condition::ramp(j.at("grade_deg").get<double>());
    }
    fail(Err::Parse, "unknown condition kind '" + kind + "'");
}

json condition_to_json(const Condition& c) {
    json j;
    if (c.kind == ConditionKind::LevelGround) {
        j["kind"] = "level_ground";
        j["speed_mps"] = c.speed_mps;
    } else {
        j["kind"] = "ramp";
        j["grade_deg"] = c.grade_deg;
    }
    return j;
}

Condition Condition::level(double speed) {
    if (!std::isfinite(speed) || speed < 0.0) {
        fail(Err::InvalidArgument, "level-ground speed must be finite and >= 0");
    }
    Condition c;
    c.kind = ConditionKind::LevelGround;
    c.speed_mps = speed;
    return c;
}

Condition Condition::ramp(double grade) {
    if (!std::isfinite(grade)) {
        fail(Err::InvalidArgument, "ramp grade must be finite");
    }
    Condition c;
    c.kind = ConditionKind::Ramp;
    c.grade_deg = grade;
    return c;
}

std::string Condition::key() const {
    char buf[48];
    if (kind == ConditionKind::LevelGround) {
        std::snprintf(buf, sizeof(buf), "level_%g", speed_mps);
    } else {
        std::snprintf(buf, sizeof(buf), "ramp_%+g", grade_deg);
    }
    return std::string(buf);
}

std::string Condition::environment() const {
    if (kind == ConditionKind::LevelGround) return "level";
    return grade_deg >= 0.0 ? "incline" : "decline";
}

bool Condition::operator==(const Condition& other) const {
    if (kind != other.kind) return false;
    return kind == ConditionKind::LevelGround ? speed_mps == other.speed_mps
                                              : grade_deg == other.grade_deg;
}

std::string trial_key(const std::string& subject_id, const Condition& condition) {
    return subject_id + "/" + condition.key();
}

void Trial::validate() const {
    if (sample_rate_hz <= 0.0) {
        fail(Err::InvalidArgument, "sample_rate_hz must be positive");
    }
    const std::size_t n = time_s.size();
    auto check_set = [&](const ChannelSet& set, const char* what) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            if (set[j].size() != n) {
                fail(Err::LengthMismatch, std::string(what) + " channel '" + kJointNames[j] +
                                              "' length " + std::to_string(set[j].size()) +
                                              " != time length " + std::to_string(n));
            }
            check_finite(set[j], std::string(kJointNames[j]) + " (" + what + ")");
        }
    };
    check_set(angles_rad, "angle");
    if (velocities_rad_s) check_set(*velocities_rad_s, "velocity");
    if (gt_moments_nm_per_kg) check_set(*gt_moments_nm_per_kg, "moment");

    const double period = 1.0 / sample_rate_hz;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = time_s[i + 1] - time_s[i];
        if (dt <= 0.0) {
            fail(Err::NonMonotoneTime,
                 "time_s not strictly increasing at row " + std::to_string(i + 1));
        }
        if (std::abs(dt - period) >= 0.01 * period) {
            fail(Err::IrregularSampling,
                 "time jitter at row " + std::to_string(i + 1) + ": dt=" + fmt_g17(dt) +
                     " vs nominal " + fmt_g17(period));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(time_s[i])) {
            fail(Err::NonFiniteSample, "non-finite value in channel 'time_s' at row " +
                                           std::to_string(i));
        }
    }
    if (body_mass_kg && !(*body_mass_kg > 0.0)) {
        fail(Err::InvalidArgument, "body_mass_kg must be positive");
    }
}

ColumnMap ColumnMap::canonical() { return ColumnMap{}; }

ColumnMap ColumnMap::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("column map: ") + e.what());
    }
    ColumnMap m;
    try {
        if (j.contains("time_col")) m.time_col = j["time_col"].get<std::string>();
        if (j.contains("angle_cols")) m.angle_cols = columns_from_json(j["angle_cols"]);
        if (j.contains("velocity_cols")) m.velocity_cols = columns_from_json(j["velocity_cols"]);
        if (j.contains("moment_cols")) m.moment_cols = columns_from_json(j["moment_cols"]);
        if (j.contains("angle_unit")) m.angle_unit = j["angle_unit"].get<std::string>();
        if (j.contains("angle_sign")) {
            const auto& s = j["angle_sign"];
            if (!s.is_array() || s.size() != kJointCount) {
                fail(Err::Parse, "angle_sign must have exactly 4 entries");
            }
            for (std::size_t i = 0; i < kJointCount; ++i) m.angle_sign[i] = s[i].get<double>();
        }
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("column map: ") + e.what());
    }
    if (m.angle_unit != "rad" && m.angle_unit != "deg") {
        fail(Err::Parse, "angle_unit must be 'rad' or 'deg', got '" + m.angle_unit + "'");
    }
    return m;
}

std::string ColumnMap::to_json() const {
    json j;
    j["time_col"] = time_col;
    j["angle_cols"] = angle_cols;
    if (velocity_cols) j["velocity_cols"] = *velocity_cols;
    if (moment_cols) j["moment_cols"] = *moment_cols;
    j["angle_unit"] = angle_unit;
    j["angle_sign"] = angle_sign;
    return j.dump();
}

Trial load_canonical_csv(const std::string& path, const ColumnMap& schema) {
    if (!fs::exists(path)) {
        fail(Err::Io, "no such file: " + path);
    }
    const std::string side = sidecar_path(path);
    if (!fs::exists(side)) {
        fail(Err::Io, "missing sidecar: " + side);
    }

    Trial trial;
    std::string effective_unit = schema.angle_unit;
    try {
        const json meta = json::parse(read_text_file(side));
        trial.subject_id = meta.at("subject_id").get<std::string>();
        trial.condition = condition_from_json(meta.at("condition"));
        trial.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
        if (meta.contains("body_mass_kg")) trial.body_mass_kg = meta["body_mass_kg"].get<double>();
        if (meta.contains("angle_unit")) effective_unit = meta["angle_unit"].get<std::string>();
    } catch (const json::exception& e) {
        fail(Err::Parse, side + ": " + e.what());
    }
    if (trial.sample_rate_hz <= 0.0) {
        fail(Err::Parse, side + ": sample_rate_hz must be positive");
    }
    if (effective_unit != "rad" && effective_unit != "deg") {
        fail(Err::Parse, side + ": angle_unit must be 'rad' or 'deg'");
    }
    trial.angle_unit = "rad";

    std::ifstream in(path);
    if (!in) {
        fail(Err::Io, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        fail(Err::Parse, path + ": empty file");
    }
    const auto header = split_csv_line(line);

    const int time_idx = require_column(header, schema.time_col, path);
    std::array<int, kJointCount> angle_idx{};
    for (std::size_t j = 0; j < kJointCount; ++j) {
        angle_idx[j] = require_column(header, schema.angle_cols[j], path);
    }

    // Velocity/moment channels load only when the source declares them: either
    // explicitly in the ColumnMap or, for the canonical layout, by header name.
    auto optional_block = [&](const std::optional<std::array<std::string, kJointCount>>& declared,
                              const char* canonical_suffix,
                              std::array<int, kJointCount>& idx) -> bool {
        if (declared) {
            for (std::size_t j = 0; j < kJointCount; ++j) {
                idx[j] = require_column(header, (*declared)[j], path);
            }
            return true;
        }
        for (std::size_t j = 0; j < kJointCount; ++j) {
            idx[j] = find_column(header, std::string(kJointNames[j]) + canonical_suffix);
            if (idx[j] < 0) return false;
        }
        return true;
    };
    std::array<int, kJointCount> vel_idx{};
    std::array<int, kJointCount> mom_idx{};
    const bool has_vel = optional_block(schema.velocity_cols, "_vel", vel_idx);
    const bool has_mom = optional_block(schema.moment_cols, "_mom", mom_idx);

    ChannelSet velocities;
    ChannelSet moments;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        auto cell = [&](int idx, const std::string& col) -> double {
            if (idx >= static_cast<int>(fields.size())) {
                fail(Err::Parse, path + ": row " + std::to_string(row) + " has too few fields");
            }
            double v = 0.0;
            if (!parse_double(fields[static_cast<std::size_t>(idx)], v) || !std::isfinite(v)) {
                fail(Err::NonFiniteSample, path + ": column '" + col + "' row " +
                                               std::to_string(row) + " is not a finite number");
            }
            return v;
        };
        trial.time_s.push_back(cell(time_idx, schema.time_col));
        for (std::size_t j = 0; j < kJointCount; ++j) {
            trial.angles_rad[j].push_back(schema.angle_sign[j] *
                                          cell(angle_idx[j], schema.angle_cols[j]));
            if (has_vel) {
                velocities[j].push_back(schema.angle_sign[j] *
                                        cell(vel_idx[j], header[static_cast<std::size_t>(vel_idx[j])]));
            }
            if (has_mom) {
                moments[j].push_back(cell(mom_idx[j], header[static_cast<std::size_t>(mom_idx[j])]));
            }
        }
        ++row;
    }

    if (effective_unit == "deg") {
        const double scale = kPi / 180.0;
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (auto& v : trial.angles_rad[j]) v *= scale;
            if (has_vel) {
                for (auto& v : velocities[j]) v *= scale;
            }
        }
    }
    if (has_vel) trial.velocities_rad_s = std::move(velocities);
    if (has_mom) trial.gt_moments_nm_per_kg = std::move(moments);

    trial.validate();
    return trial;
}

void write_canonical_csv(const Trial& trial, const std::string& csv_path) {
    trial.validate();

    std::string csv;
    csv.reserve(trial.size() * 96);
    csv += "time_s";
    for (const auto* name : kJointNames) csv += std::string(",") + name + "_rad";
    if (trial.velocities_rad_s) {
        for (const auto* name : kJointNames) csv += std::string(",") + name + "_vel";
    }
    if (trial.gt_moments_nm_per_kg) {
        for (const auto* name : kJointNames) csv += std::string(",") + name + "_mom";
    }
    csv += "\n";
    for (std::size_t i = 0; i < trial.size(); ++i) {
        csv += fmt_g17(trial.time_s[i]);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            csv += "," + fmt_g17(trial.angles_rad[j][i]);
        }
        if (trial.velocities_rad_s) {
            for (std::size_t j = 0; j < kJointCount; ++j) {
                csv += "," + fmt_g17((*trial.velocities_rad_s)[j][i]);
            }
        }
        if (trial.gt_moments_nm_per_kg) {
            for (std::size_t j = 0; j < kJointCount; ++j) {
                csv += "," + fmt_g17((*trial.gt_moments_nm_per_kg)[j][i]);
            }
        }
        csv += "\n";
    }
    write_text_file_atomic(csv_path, csv);

    json meta;
    meta["subject_id"] = trial.subject_id;
    meta["condition"] = condition_to_json(trial.condition);
    meta["sample_rate_hz"] = trial.sample_rate_hz;
    if (trial.body_mass_kg) meta["body_mass_kg"] = *trial.body_mass_kg;
    meta["angle_unit"] = "rad";
    write_text_file_atomic(sidecar_path(csv_path), meta.dump(2) + "\n");
}

CatalogResult catalog_directory(const std::string& root, const ColumnMap& schema, int jobs) {
    if (!fs::is_directory(root)) {
        fail(Err::Io, "not a directory: " + root);
    }
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());

    struct Parsed {
        std::optional<Trial> trial;
        Err code = Err::None;
        std::string message;
    };
    std::vector<Parsed> parsed(paths.size());
    auto parse_one = [&](std::size_t i) {
        try {
            parsed[i].trial = load_canonical_csv(paths[i], schema);
        } catch (const Error& e) {
            parsed[i].code = e.code();
            parsed[i].message = e.what();
        }
    };

    if (jobs > 1 && paths.size() > 1) {
        std::vector<std::future<void>> futures;
        std::size_t next = 0;
        while (next < paths.size()) {
            futures.clear();
            const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                            paths.size() - next);
            for (std::size_t k = 0; k < batch; ++k) {
                futures.push_back(std::async(std::launch::async, parse_one, next + k));
            }
            for (auto& f : futures) f.get();
            next += batch;
        }
    } else {
        for (std::size_t i = 0; i < paths.size(); ++i) parse_one(i);
    }

    CatalogResult result;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (parsed[i].trial) {
            const std::string key =
                trial_key(parsed[i].trial->subject_id, parsed[i].trial->condition);
            if (result.catalog.provenance.count(key)) {
                fail(Err::DuplicateTrialKey, "duplicate trial key '" + key + "': " + paths[i] +
                                                 " and " + result.catalog.provenance[key]);
            }
            result.catalog.provenance[key] = paths[i];
            result.catalog.trials.push_back(std::move(*parsed[i].trial));
        } else {
            result.failures.push_back({paths[i], parsed[i].code, parsed[i].message});
        }
    }
    if (result.catalog.trials.empty()) {
        fail(Err::EmptyCatalog, "no trial parsed from " + root + " (" +
                                    std::to_string(result.failures.size()) + " failures)");
    }
    return result;
}

} // namespace exotorq
