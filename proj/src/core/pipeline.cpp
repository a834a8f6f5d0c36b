/**
 * @file pipeline.cpp
 */

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "condition_json.hpp"
#include "json.hpp"
#include "textio.hpp"

namespace exotorq {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kInferStart = std::size_t(kHistorySteps) - 1;

const std::vector<std::string> kEvalChannels = {"hip_l",       "hip_r",       "knee_l",
                                                "knee_r",      "hip_l_power", "hip_r_power",
                                                "knee_l_power", "knee_r_power"};

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    if (!j.is_object()) fail(Err::Parse, where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) fail(Err::Parse, where + ": unknown key '" + key + "'");
    }
}

std::size_t joint_index(const std::string& name) {
    for (std::size_t j = 0; j < kJointCount; ++j)
        if (name == kJointNames[j]) return j;
    fail(Err::Parse, "unknown joint '" + name + "'");
}

json segment_to_json(const SegmentConfig& s) {
    return json{{"min_cycle_s", s.min_cycle_s},
                {"prominence_frac", s.prominence_frac},
                {"max_duration_dev", s.max_duration_dev},
                {"anchor_joint", kJointNames[s.anchor_joint]},
                {"flexion_sign", s.flexion_sign}};
}

SegmentConfig segment_from_json(const json& j) {
    reject_unknown(j, {"min_cycle_s", "prominence_frac", "max_duration_dev", "anchor_joint",
                       "flexion_sign"},
                   "segment");
    SegmentConfig s;
    if (j.contains("min_cycle_s")) s.min_cycle_s = j["min_cycle_s"].get<double>();
    if (j.contains("prominence_frac")) s.prominence_frac = j["prominence_frac"].get<double>();
    if (j.contains("max_duration_dev")) s.max_duration_dev = j["max_duration_dev"].get<double>();
    if (j.contains("anchor_joint")) s.anchor_joint = joint_index(j["anchor_joint"].get<std::string>());
    if (j.contains("flexion_sign")) s.flexion_sign = j["flexion_sign"].get<double>();
    return s;
}

std::vector<Condition> conditions_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) fail(Err::Parse, where + ": expected an array of conditions");
    std::vector<Condition> out;
    for (const auto& c : j) out.push_back(condition_from_json(c));
    return out;
}

json conditions_to_json(const std::vector<Condition>& conditions) {
    json j = json::array();
    for (const auto& c : conditions) j.push_back(condition_to_json(c));
    return j;
}

std::string file_stem_for(const Trial& t) {
    return t.subject_id + "_" + t.condition.key();
}

UniformSeries full_series(const Trial& t, const std::vector<double>& channel) {
    UniformSeries s;
    s.rate_hz = t.sample_rate_hz;
    s.start_s = t.time_s.empty() ? 0.0 : t.time_s[0];
    s.values = channel;
    return s;
}

UniformSeries span_series(const Trial& t, const std::vector<double>& channel) {
    UniformSeries s;
    s.rate_hz = t.sample_rate_hz;
    s.start_s = t.time_s[kInferStart];
    s.values.assign(channel.begin() + long(kInferStart), channel.end());
    return s;
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(Err::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

double find_channel_r(const std::vector<ChannelCorrelation>& cs, const std::string& name) {
    for (const auto& c : cs)
        if (c.channel == name) return c.r;
    fail(Err::Internal, "missing correlation channel '" + name + "'");
}

json power_aggregate_to_json(const PowerAggregate& a) {
    return json{{"mp_mean", a.mp_mean},   {"mp_sd", a.mp_sd},   {"mpp_mean", a.mpp_mean},
                {"mpp_sd", a.mpp_sd},     {"mnp_mean", a.mnp_mean}, {"mnp_sd", a.mnp_sd},
                {"cycle_count", a.cycle_count}};
}

PowerAggregate power_aggregate_from_json(const json& j) {
    PowerAggregate a;
    a.mp_mean = j.at("mp_mean").get<double>();
    a.mp_sd = j.at("mp_sd").get<double>();
    a.mpp_mean = j.at("mpp_mean").get<double>();
    a.mpp_sd = j.at("mpp_sd").get<double>();
    a.mnp_mean = j.at("mnp_mean").get<double>();
    a.mnp_sd = j.at("mnp_sd").get<double>();
    a.cycle_count = j.at("cycle_count").get<std::size_t>();
    return a;
}

json profile_to_json(const CycleProfile& p) {
    json arr = json::array();
    for (double v : p) arr.push_back(v);
    return arr;
}

CycleProfile profile_from_json(const json& j) {
    CycleProfile p;
    for (const auto& v : j) p.push_back(v.get<double>());
    return p;
}

json failures_to_json(const std::vector<CatalogFailure>& fs_) {
    json arr = json::array();
    for (const auto& f : fs_)
        arr.push_back(json{{"path", f.path}, {"code", err_name(f.code)}, {"message", f.message}});
    return arr;
}

/// Sorted catalog filtered to the requested subjects / condition filter.
std::vector<Trial> select_trials(CatalogResult& result, const std::vector<std::string>& subjects,
                                 const std::vector<std::string>& exclude,
                                 const std::vector<Condition>* conditions) {
    std::vector<Trial> out;
    for (auto& t : result.catalog.trials) {
        if (!subjects.empty() &&
            std::find(subjects.begin(), subjects.end(), t.subject_id) == subjects.end())
            continue;
        if (std::find(exclude.begin(), exclude.end(), t.subject_id) != exclude.end()) continue;
        if (conditions && !conditions->empty()) {
            bool match = false;
            for (const auto& c : *conditions)
                if (c.key() == t.condition.key()) match = true;
            if (!match) continue;
        }
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const Trial& a, const Trial& b) {
        return trial_key(a.subject_id, a.condition) < trial_key(b.subject_id, b.condition);
    });
    return out;
}

} // namespace

// --- RunConfig -------------------------------------------------------------

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["jobs"] = jobs;
    j["out_dir"] = out_dir;
    j["convert"] = {{"raw_dir", convert.raw_dir},
                    {"column_map", json::parse(convert.column_map.to_json())}};
    json subjects = json::array();
    for (const auto& s : synth.subjects) subjects.push_back(s);
    j["synth"] = {{"spec", json::parse(synth_spec_to_json(synth.spec))},
                  {"subjects", subjects},
                  {"conditions", conditions_to_json(synth.conditions)}};
    j["train"] = {{"trials_dir", train.trials_dir},
                  {"epochs", train.train.epochs},
                  {"batch_size", train.train.batch_size},
                  {"learning_rate", train.train.learning_rate},
                  {"w_reg", train.train.w_reg},
                  {"delay_feature_s", train.delay_feature_s},
                  {"tau_max_nm", train.tau_max_nm}};
    j["infer"] = {{"trial_csv", infer.trial_csv},
                  {"model_file", infer.model_file},
                  {"delay_feature_s", infer.delay_feature_s}};
    json inc = json::array(), exc = json::array();
    for (const auto& s : evaluate.subjects) inc.push_back(s);
    for (const auto& s : evaluate.exclude_subjects) exc.push_back(s);
    j["evaluate"] = {{"trials_dir", evaluate.trials_dir},
                     {"model_file", evaluate.model_file},
                     {"tag", evaluate.tag},
                     {"inject_gt_as_pred", evaluate.inject_gt_as_pred},
                     {"subjects", inc},
                     {"exclude_subjects", exc},
                     {"delay_feature_s", evaluate.delay_feature_s},
                     {"lag_sweep", evaluate.eval.lag_sweep},
                     {"max_lag_pct", evaluate.eval.max_lag_pct},
                     {"per_cycle_correlation", evaluate.eval.per_cycle_correlation},
                     {"segment", segment_to_json(evaluate.segment)}};
    json delays = json::array();
    for (double d : delay_sweep.sweep.delays_s) delays.push_back(d);
    j["delay_sweep"] = {{"trials_dir", delay_sweep.trials_dir},
                        {"model_file", delay_sweep.model_file},
                        {"conditions", conditions_to_json(delay_sweep.conditions)},
                        {"delays_s", delays},
                        {"delay_feature_s", delay_sweep.sweep.delay_feature_s},
                        {"co_vary_input_delay", delay_sweep.sweep.co_vary_input_delay},
                        {"segment", segment_to_json(delay_sweep.sweep.segment)}};
    j["report"] = {{"report_json", report.report_json}};
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("run config: ") + e.what());
    }
    try {
        reject_unknown(j,
                       {"seed", "jobs", "out_dir", "convert", "synth", "train", "infer",
                        "evaluate", "delay_sweep", "report"},
                       "run config");
        RunConfig cfg;
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("convert")) {
            const json& c = j["convert"];
            reject_unknown(c, {"raw_dir", "column_map"}, "convert");
            if (c.contains("raw_dir")) cfg.convert.raw_dir = c["raw_dir"].get<std::string>();
            if (c.contains("column_map"))
                cfg.convert.column_map = ColumnMap::from_json(c["column_map"].dump());
        }
        if (j.contains("synth")) {
            const json& s = j["synth"];
            reject_unknown(s, {"spec", "subjects", "conditions"}, "synth");
            if (s.contains("spec")) cfg.synth.spec = synth_spec_from_json(s["spec"].dump());
            if (s.contains("subjects"))
                for (const auto& v : s["subjects"]) cfg.synth.subjects.push_back(v.get<std::string>());
            if (s.contains("conditions"))
                cfg.synth.conditions = conditions_from_json(s["conditions"], "synth.conditions");
        }
        if (j.contains("train")) {
            const json& t = j["train"];
            reject_unknown(t,
                           {"trials_dir", "epochs", "batch_size", "learning_rate", "w_reg",
                            "delay_feature_s", "tau_max_nm"},
                           "train");
            if (t.contains("trials_dir")) cfg.train.trials_dir = t["trials_dir"].get<std::string>();
            if (t.contains("epochs")) cfg.train.train.epochs = t["epochs"].get<int>();
            if (t.contains("batch_size")) cfg.train.train.batch_size = t["batch_size"].get<int>();
            if (t.contains("learning_rate"))
                cfg.train.train.learning_rate = t["learning_rate"].get<double>();
            if (t.contains("w_reg")) cfg.train.train.w_reg = t["w_reg"].get<double>();
            if (t.contains("delay_feature_s"))
                cfg.train.delay_feature_s = t["delay_feature_s"].get<double>();
            if (t.contains("tau_max_nm")) cfg.train.tau_max_nm = t["tau_max_nm"].get<double>();
        }
        if (j.contains("infer")) {
            const json& i = j["infer"];
            reject_unknown(i, {"trial_csv", "model_file", "delay_feature_s"}, "infer");
            if (i.contains("trial_csv")) cfg.infer.trial_csv = i["trial_csv"].get<std::string>();
            if (i.contains("model_file")) cfg.infer.model_file = i["model_file"].get<std::string>();
            if (i.contains("delay_feature_s"))
                cfg.infer.delay_feature_s = i["delay_feature_s"].get<double>();
        }
        if (j.contains("evaluate")) {
            const json& e = j["evaluate"];
            reject_unknown(e,
                           {"trials_dir", "model_file", "tag", "inject_gt_as_pred", "subjects",
                            "exclude_subjects", "delay_feature_s", "lag_sweep", "max_lag_pct",
                            "per_cycle_correlation", "segment"},
                           "evaluate");
            if (e.contains("trials_dir")) cfg.evaluate.trials_dir = e["trials_dir"].get<std::string>();
            if (e.contains("model_file")) cfg.evaluate.model_file = e["model_file"].get<std::string>();
            if (e.contains("tag")) cfg.evaluate.tag = e["tag"].get<std::string>();
            if (e.contains("inject_gt_as_pred"))
                cfg.evaluate.inject_gt_as_pred = e["inject_gt_as_pred"].get<bool>();
            if (e.contains("subjects"))
                for (const auto& v : e["subjects"])
                    cfg.evaluate.subjects.push_back(v.get<std::string>());
            if (e.contains("exclude_subjects"))
                for (const auto& v : e["exclude_subjects"])
                    cfg.evaluate.exclude_subjects.push_back(v.get<std::string>());
            if (e.contains("delay_feature_s"))
                cfg.evaluate.delay_feature_s = e["delay_feature_s"].get<double>();
            if (e.contains("lag_sweep")) cfg.evaluate.eval.lag_sweep = e["lag_sweep"].get<bool>();
            if (e.contains("max_lag_pct")) cfg.evaluate.eval.max_lag_pct = e["max_lag_pct"].get<int>();
            if (e.contains("per_cycle_correlation"))
                cfg.evaluate.eval.per_cycle_correlation = e["per_cycle_correlation"].get<bool>();
            if (e.contains("segment")) cfg.evaluate.segment = segment_from_json(e["segment"]);
        }
        if (j.contains("delay_sweep")) {
            const json& d = j["delay_sweep"];
            reject_unknown(d,
                           {"trials_dir", "model_file", "conditions", "delays_s",
                            "delay_feature_s", "co_vary_input_delay", "segment"},
                           "delay_sweep");
            if (d.contains("trials_dir"))
                cfg.delay_sweep.trials_dir = d["trials_dir"].get<std::string>();
            if (d.contains("model_file"))
                cfg.delay_sweep.model_file = d["model_file"].get<std::string>();
            if (d.contains("conditions"))
                cfg.delay_sweep.conditions =
                    conditions_from_json(d["conditions"], "delay_sweep.conditions");
            if (d.contains("delays_s")) {
                cfg.delay_sweep.sweep.delays_s.clear();
                for (const auto& v : d["delays_s"])
                    cfg.delay_sweep.sweep.delays_s.push_back(v.get<double>());
            }
            if (d.contains("delay_feature_s"))
                cfg.delay_sweep.sweep.delay_feature_s = d["delay_feature_s"].get<double>();
            if (d.contains("co_vary_input_delay"))
                cfg.delay_sweep.sweep.co_vary_input_delay = d["co_vary_input_delay"].get<bool>();
            if (d.contains("segment"))
                cfg.delay_sweep.sweep.segment = segment_from_json(d["segment"]);
        }
        if (j.contains("report")) {
            const json& r = j["report"];
            reject_unknown(r, {"report_json"}, "report");
            if (r.contains("report_json")) cfg.report.report_json = r["report_json"].get<std::string>();
        }
        if (cfg.jobs < 1) fail(Err::InvalidArgument, "jobs must be >= 1");
        return cfg;
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("run config: ") + e.what());
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_json(read_text_file(path));
}

Provenance make_provenance(const RunConfig& cfg) {
    Provenance p;
    const std::string text = cfg.to_json();
    p.config_crc32 = crc32_hex(crc32_of(text.data(), text.size()));
    p.seed = cfg.seed;
    return p;
}

std::string provenance_csv_header(const Provenance& p) {
    std::string h;
    h += "# tool_version " + p.tool_version + "\n";
    h += "# config_crc32 " + p.config_crc32 + "\n";
    h += "# model_crc32 " + p.model_crc32 + "\n";
    h += "# seed " + std::to_string(p.seed) + "\n";
    return h;
}

json provenance_to_json(const Provenance& p) {
    return json{{"tool_version", p.tool_version},
                {"config_crc32", p.config_crc32},
                {"model_crc32", p.model_crc32},
                {"seed", p.seed}};
}

// --- Trial preparation -----------------------------------------------------

Trial prepare_trial(const Trial& raw) {
    raw.validate();
    Trial out = raw;
    if (std::abs(raw.sample_rate_hz - kWorkingRateHz) > 1e-9) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            out.angles_rad[j] = resample(full_series(raw, raw.angles_rad[j]), kWorkingRateHz).values;
        }
        if (raw.velocities_rad_s) {
            for (std::size_t j = 0; j < kJointCount; ++j)
                (*out.velocities_rad_s)[j] =
                    resample(full_series(raw, (*raw.velocities_rad_s)[j]), kWorkingRateHz).values;
        }
        if (raw.gt_moments_nm_per_kg) {
            for (std::size_t j = 0; j < kJointCount; ++j)
                (*out.gt_moments_nm_per_kg)[j] =
                    resample(full_series(raw, (*raw.gt_moments_nm_per_kg)[j]), kWorkingRateHz)
                        .values;
        }
        out.sample_rate_hz = kWorkingRateHz;
        const double t0 = raw.time_s.empty() ? 0.0 : raw.time_s[0];
        out.time_s.resize(out.angles_rad[0].size());
        for (std::size_t i = 0; i < out.time_s.size(); ++i)
            out.time_s[i] = t0 + double(i) / kWorkingRateHz;
    }
    if (!out.velocities_rad_s) {
        out.velocities_rad_s.emplace();
        for (std::size_t j = 0; j < kJointCount; ++j)
            (*out.velocities_rad_s)[j] =
                central_diff(full_series(out, out.angles_rad[j])).values;
    }
    out.validate();
    return out;
}

// --- convert ---------------------------------------------------------------

ConvertOutcome cmd_convert(const RunConfig& cfg) {
    if (cfg.convert.raw_dir.empty()) fail(Err::InvalidArgument, "convert: raw_dir not set");
    ensure_out_dir(cfg.out_dir);
    CatalogResult result = catalog_directory(cfg.convert.raw_dir, cfg.convert.column_map, cfg.jobs);

    ConvertOutcome outcome;
    outcome.failures = result.failures;
    std::vector<Trial> trials = select_trials(result, {}, {}, nullptr);
    for (const Trial& t : trials) {
        const std::string key = trial_key(t.subject_id, t.condition);
        try {
            const Trial prepared = prepare_trial(t);
            const std::string path = join_path(cfg.out_dir, file_stem_for(prepared) + ".csv");
            write_canonical_csv(prepared, path);
            outcome.written.push_back(path);
        } catch (const Error& e) {
            outcome.failures.push_back({key, e.code(), e.what()});
        }
    }
    std::sort(outcome.written.begin(), outcome.written.end());
    if (outcome.written.empty() && !outcome.failures.empty())
        fail(Err::PartialFailure, "convert: no file converted successfully");
    return outcome;
}

// --- synth -----------------------------------------------------------------

SynthOutcome cmd_synth(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    std::vector<std::string> subjects = cfg.synth.subjects;
    if (subjects.empty()) subjects.push_back(cfg.synth.spec.subject_id);
    std::vector<Condition> conditions = cfg.synth.conditions;
    if (conditions.empty()) conditions.push_back(cfg.synth.spec.condition);

    SynthOutcome outcome;
    std::uint64_t index = 0;
    for (const auto& subject : subjects) {
        for (const auto& condition : conditions) {
            SynthSpec spec = cfg.synth.spec;
            spec.subject_id = subject;
            spec.condition = condition;
            spec.seed = mix_seed(cfg.seed, index++);
            const Trial trial = generate(spec);
            const std::string path = join_path(cfg.out_dir, file_stem_for(trial) + ".csv");
            write_canonical_csv(trial, path);
            outcome.written.push_back(path);
        }
    }
    return outcome;
}

// --- train -----------------------------------------------------------------

namespace {

std::vector<TrainSample> build_training_set(const std::vector<Trial>& trials,
                                            const TrainRunConfig& tc,
                                            std::vector<CatalogFailure>& failures) {
    std::vector<TrainSample> samples;
    for (const Trial& raw : trials) {
        const std::string key = trial_key(raw.subject_id, raw.condition);
        try {
            const Trial t = prepare_trial(raw);
            if (!t.gt_moments_nm_per_kg)
                fail(Err::InvalidArgument, "trial has no GT moments to train on");
            if (!t.body_mass_kg)
                fail(Err::InvalidArgument, "trial has no body mass; targets need Nm");
            const auto windows = build_windows(t, tc.delay_feature_s);
            const ChannelSet& mom = *t.gt_moments_nm_per_kg;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                TrainSample s;
                s.input = windows[w];
                const std::size_t i = w + kInferStart;
                for (std::size_t j = 0; j < kJointCount; ++j) {
                    s.target[j] =
                        normalize_clip_torque(mom[j][i] * *t.body_mass_kg, tc.tau_max_nm);
                }
                samples.push_back(s);
            }
        } catch (const Error& e) {
            failures.push_back({key, e.code(), e.what()});
        }
    }
    return samples;
}

} // namespace

TrainOutcome cmd_train(const RunConfig& cfg) {
    if (cfg.train.trials_dir.empty()) fail(Err::InvalidArgument, "train: trials_dir not set");
    ensure_out_dir(cfg.out_dir);
    CatalogResult result = catalog_directory(cfg.train.trials_dir, ColumnMap::canonical(), cfg.jobs);

    TrainOutcome outcome;
    outcome.failures = result.failures;
    const std::vector<Trial> trials = select_trials(result, {}, {}, nullptr);
    const std::vector<TrainSample> samples =
        build_training_set(trials, cfg.train, outcome.failures);
    if (samples.empty()) fail(Err::InsufficientSamples, "train: no usable training samples");

    TrainConfig tc = cfg.train.train;
    tc.seed = cfg.seed;
    TrainResult trained = train(samples, tc);
    trained.model.tau_max_nm = cfg.train.tau_max_nm;

    outcome.model_path = join_path(cfg.out_dir, "model.json");
    save_model(trained.model, outcome.model_path);
    outcome.model_crc32 = crc32_hex(model_payload_crc(trained.model));
    outcome.initial_loss = trained.initial_loss;
    outcome.final_loss = trained.loss_history.empty() ? trained.initial_loss
                                                      : trained.loss_history.back();
    outcome.sample_count = samples.size();

    Provenance prov = make_provenance(cfg);
    prov.model_crc32 = outcome.model_crc32;
    std::string csv = provenance_csv_header(prov);
    csv += "epoch,loss\n";
    csv += "0," + fmt_g17(trained.initial_loss) + "\n";
    for (std::size_t e = 0; e < trained.loss_history.size(); ++e)
        csv += std::to_string(e + 1) + "," + fmt_g17(trained.loss_history[e]) + "\n";
    outcome.loss_csv_path = join_path(cfg.out_dir, "loss_curve.csv");
    write_text_file_atomic(outcome.loss_csv_path, csv);
    return outcome;
}

// --- infer -----------------------------------------------------------------

InferOutcome cmd_infer(const RunConfig& cfg) {
    if (cfg.infer.trial_csv.empty()) fail(Err::InvalidArgument, "infer: trial_csv not set");
    if (cfg.infer.model_file.empty()) fail(Err::InvalidArgument, "infer: model_file not set");
    ensure_out_dir(cfg.out_dir);

    const TorqueModel model = load_model(cfg.infer.model_file);
    const Trial trial = prepare_trial(load_canonical_csv(cfg.infer.trial_csv, ColumnMap::canonical()));
    const auto norm = infer_trial(model, trial, cfg.infer.delay_feature_s);
    const auto phys = predict_torque_nm_per_kg(model, trial, cfg.infer.delay_feature_s);

    Provenance prov = make_provenance(cfg);
    prov.model_crc32 = crc32_hex(model_payload_crc(model));
    std::string csv = provenance_csv_header(prov);
    csv += "time_s";
    for (const char* j : kJointNames) csv += std::string(",") + j + "_torque_norm";
    for (const char* j : kJointNames) csv += std::string(",") + j + "_torque_nm_per_kg";
    csv += "\n";
    const std::size_t rows = norm[0].values.size();
    for (std::size_t i = 0; i < rows; ++i) {
        csv += fmt_g17(norm[0].time_at(i));
        for (std::size_t j = 0; j < kJointCount; ++j) csv += "," + fmt_g17(norm[j].values[i]);
        for (std::size_t j = 0; j < kJointCount; ++j) csv += "," + fmt_g17(phys[j].values[i]);
        csv += "\n";
    }

    InferOutcome outcome;
    const fs::path stem = fs::path(cfg.infer.trial_csv).stem();
    outcome.csv_path = join_path(cfg.out_dir, stem.string() + "_inferred.csv");
    outcome.rows = rows;
    write_text_file_atomic(outcome.csv_path, csv);
    return outcome;
}

// --- evaluate --------------------------------------------------------------

double environment_average(const std::vector<double>& values) {
    if (values.empty()) fail(Err::EmptySet, "environment average of zero conditions");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / double(values.size());
}

namespace {

/// Per-trial cycle profiles of all eight evaluation channels (four torque,
/// four power), prediction and GT side by side.
struct TrialProfiles {
    std::vector<std::vector<CycleProfile>> pred; ///< [channel][cycle]
    std::vector<std::vector<CycleProfile>> gt;
    std::size_t cycles = 0;
};

TrialProfiles evaluate_trial(const Trial& t, const TorqueModel* model,
                             const EvaluateConfig& ecfg) {
    if (!t.gt_moments_nm_per_kg)
        fail(Err::InvalidArgument, "trial has no GT moments; nothing to evaluate against");

    const Segmentation seg =
        segment_cycles(full_series(t, t.angles_rad[ecfg.segment.anchor_joint]), ecfg.segment);

    std::array<UniformSeries, kJointCount> gt_tau, vel, pred_tau;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        gt_tau[j] = span_series(t, (*t.gt_moments_nm_per_kg)[j]);
        vel[j] = span_series(t, (*t.velocities_rad_s)[j]);
    }
    if (ecfg.inject_gt_as_pred) {
        pred_tau = gt_tau;
    } else {
        pred_tau = predict_torque_nm_per_kg(*model, t, ecfg.delay_feature_s);
    }

    std::array<UniformSeries, kJointCount> pred_pow, gt_pow;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        pred_pow[j] = power_series(pred_tau[j], vel[j], 0);
        gt_pow[j] = power_series(gt_tau[j], vel[j], 0);
    }

    TrialProfiles out;
    out.pred.resize(kEvalChannels.size());
    out.gt.resize(kEvalChannels.size());
    for (const auto& [a, b] : seg.cycles) {
        if (a < kInferStart) continue;
        const std::size_t s = a - kInferStart, e = b - kInferStart;
        for (std::size_t j = 0; j < kJointCount; ++j) {
            out.pred[j].push_back(normalize_cycle(pred_tau[j], s, e));
            out.gt[j].push_back(normalize_cycle(gt_tau[j], s, e));
            out.pred[j + kJointCount].push_back(normalize_cycle(pred_pow[j], s, e));
            out.gt[j + kJointCount].push_back(normalize_cycle(gt_pow[j], s, e));
        }
        ++out.cycles;
    }
    if (out.cycles == 0) fail(Err::NoCyclesFound, "no cycle lies inside the inferred span");
    return out;
}

GaitCycleSet cycle_set_from(std::vector<std::vector<CycleProfile>> cycles, double rate_hz) {
    GaitCycleSet set;
    set.channel_names = kEvalChannels;
    set.source_rate_hz = rate_hz;
    set.cycles = std::move(cycles);
    for (const auto& per_channel : set.cycles) {
        const EnsembleStats st = ensemble(per_channel);
        set.mean_profile.push_back(st.mean);
        set.sd_profile.push_back(st.sd);
    }
    return set;
}

json condition_report_to_json(const ConditionReport& c) {
    json corr = json::array();
    for (const auto& cc : c.correlations)
        corr.push_back(json{{"channel", cc.channel}, {"r", cc.r}, {"lag_pct", cc.lag_pct}});
    json power = json::array();
    for (std::size_t i = 0; i < c.power_channels.size(); ++i) {
        power.push_back(json{{"channel", c.power_channels[i]},
                             {"pred", power_aggregate_to_json(c.pred_power[i])},
                             {"gt", power_aggregate_to_json(c.gt_power[i])}});
    }
    return json{{"condition_key", c.condition_key},
                {"environment", c.environment},
                {"trial_count", c.trial_count},
                {"cycle_count", c.cycle_count},
                {"correlations", corr},
                {"rows",
                 json{{"hip_torque", c.hip_torque_r},
                      {"knee_torque", c.knee_torque_r},
                      {"hip_power", c.hip_power_r},
                      {"knee_power", c.knee_power_r}}},
                {"power", power}};
}

ConditionReport condition_report_from_json(const json& j) {
    ConditionReport c;
    c.condition_key = j.at("condition_key").get<std::string>();
    c.environment = j.at("environment").get<std::string>();
    c.trial_count = j.at("trial_count").get<std::size_t>();
    c.cycle_count = j.at("cycle_count").get<std::size_t>();
    for (const auto& cc : j.at("correlations")) {
        c.correlations.push_back({cc.at("channel").get<std::string>(), cc.at("r").get<double>(),
                                  cc.at("lag_pct").get<int>()});
    }
    const json& rows = j.at("rows");
    c.hip_torque_r = rows.at("hip_torque").get<double>();
    c.knee_torque_r = rows.at("knee_torque").get<double>();
    c.hip_power_r = rows.at("hip_power").get<double>();
    c.knee_power_r = rows.at("knee_power").get<double>();
    for (const auto& p : j.at("power")) {
        c.power_channels.push_back(p.at("channel").get<std::string>());
        c.pred_power.push_back(power_aggregate_from_json(p.at("pred")));
        c.gt_power.push_back(power_aggregate_from_json(p.at("gt")));
    }
    return c;
}

std::string report_to_json_text(const EvaluationReport& rep, const Provenance& prov) {
    json j;
    j["provenance"] = provenance_to_json(prov);
    j["tag"] = rep.tag;
    json conds = json::array();
    for (const auto& c : rep.conditions) conds.push_back(condition_report_to_json(c));
    j["conditions"] = conds;
    json envs = json::array();
    for (const auto& e : rep.environments) {
        envs.push_back(json{{"environment", e.environment},
                            {"condition_count", e.condition_count},
                            {"rows",
                             json{{"hip_torque", e.hip_torque_r},
                                  {"knee_torque", e.knee_torque_r},
                                  {"hip_power", e.hip_power_r},
                                  {"knee_power", e.knee_power_r}}}});
    }
    j["environments"] = envs;
    json profs = json::array();
    for (const auto& p : rep.profiles) {
        profs.push_back(json{{"condition_key", p.condition_key},
                             {"channel", p.channel},
                             {"pred_mean", profile_to_json(p.pred_mean)},
                             {"pred_sd", profile_to_json(p.pred_sd)},
                             {"gt_mean", profile_to_json(p.gt_mean)},
                             {"gt_sd", profile_to_json(p.gt_sd)}});
    }
    j["profiles"] = profs;
    j["failures"] = failures_to_json(rep.failures);
    return j.dump(2) + "\n";
}

std::pair<EvaluationReport, Provenance> report_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("report: ") + e.what());
    }
    try {
        EvaluationReport rep;
        Provenance prov;
        const json& pj = j.at("provenance");
        prov.tool_version = pj.at("tool_version").get<std::string>();
        prov.config_crc32 = pj.at("config_crc32").get<std::string>();
        prov.model_crc32 = pj.at("model_crc32").get<std::string>();
        prov.seed = pj.at("seed").get<std::uint64_t>();
        rep.tag = j.at("tag").get<std::string>();
        for (const auto& c : j.at("conditions"))
            rep.conditions.push_back(condition_report_from_json(c));
        for (const auto& e : j.at("environments")) {
            EnvironmentReport er;
            er.environment = e.at("environment").get<std::string>();
            er.condition_count = e.at("condition_count").get<std::size_t>();
            const json& rows = e.at("rows");
            er.hip_torque_r = rows.at("hip_torque").get<double>();
            er.knee_torque_r = rows.at("knee_torque").get<double>();
            er.hip_power_r = rows.at("hip_power").get<double>();
            er.knee_power_r = rows.at("knee_power").get<double>();
            rep.environments.push_back(er);
        }
        for (const auto& p : j.at("profiles")) {
            ProfileBlock b;
            b.condition_key = p.at("condition_key").get<std::string>();
            b.channel = p.at("channel").get<std::string>();
            b.pred_mean = profile_from_json(p.at("pred_mean"));
            b.pred_sd = profile_from_json(p.at("pred_sd"));
            b.gt_mean = profile_from_json(p.at("gt_mean"));
            b.gt_sd = profile_from_json(p.at("gt_sd"));
            rep.profiles.push_back(std::move(b));
        }
        return {std::move(rep), std::move(prov)};
    } catch (const json::exception& e) {
        fail(Err::Parse, std::string("report: ") + e.what());
    }
}

std::vector<std::string> write_report_files(const EvaluationReport& rep, const Provenance& prov,
                                            const std::string& out_dir) {
    std::vector<std::string> written;
    const std::string header = provenance_csv_header(prov);

    // Table of per-condition correlation rows, two decimals.
    {
        std::string csv = header + "tag,row";
        for (const auto& c : rep.conditions) csv += "," + c.condition_key;
        csv += "\n";
        const auto row = [&](const char* name, auto get) {
            csv += rep.tag;
            csv += ",";
            csv += name;
            for (const auto& c : rep.conditions) csv += "," + fmt_f2(get(c));
            csv += "\n";
        };
        row("hip_torque", [](const ConditionReport& c) { return c.hip_torque_r; });
        row("knee_torque", [](const ConditionReport& c) { return c.knee_torque_r; });
        row("hip_power", [](const ConditionReport& c) { return c.hip_power_r; });
        row("knee_power", [](const ConditionReport& c) { return c.knee_power_r; });
        const std::string path = join_path(out_dir, "table1.csv");
        write_text_file_atomic(path, csv);
        written.push_back(path);
    }

    // Environment-wise averages.
    {
        std::string csv = header + "tag,row";
        for (const auto& e : rep.environments) csv += "," + e.environment;
        csv += "\n";
        const auto row = [&](const char* name, auto get) {
            csv += rep.tag;
            csv += ",";
            csv += name;
            for (const auto& e : rep.environments) csv += "," + fmt_f2(get(e));
            csv += "\n";
        };
        row("hip_torque", [](const EnvironmentReport& e) { return e.hip_torque_r; });
        row("knee_torque", [](const EnvironmentReport& e) { return e.knee_torque_r; });
        row("hip_power", [](const EnvironmentReport& e) { return e.hip_power_r; });
        row("knee_power", [](const EnvironmentReport& e) { return e.knee_power_r; });
        const std::string path = join_path(out_dir, "table1b.csv");
        write_text_file_atomic(path, csv);
        written.push_back(path);
    }

    // Plot-ready cycle profiles.
    {
        std::string csv = header + "condition,channel,cycle_pct,pred_mean,pred_sd,gt_mean,gt_sd\n";
        for (const auto& p : rep.profiles) {
            for (std::size_t k = 0; k < kCyclePoints; ++k) {
                csv += p.condition_key + "," + p.channel + "," + std::to_string(k) + "," +
                       fmt_g17(p.pred_mean[k]) + "," + fmt_g17(p.pred_sd[k]) + "," +
                       fmt_g17(p.gt_mean[k]) + "," + fmt_g17(p.gt_sd[k]) + "\n";
            }
        }
        const std::string path = join_path(out_dir, "profiles.csv");
        write_text_file_atomic(path, csv);
        written.push_back(path);
    }

    // Per-cycle power statistics (bar-plot shape).
    {
        std::string csv = header +
                          "condition,channel,source,mp_mean,mp_sd,mpp_mean,mpp_sd,"
                          "mnp_mean,mnp_sd,cycle_count\n";
        const auto add = [&](const std::string& cond, const std::string& ch, const char* source,
                             const PowerAggregate& a) {
            csv += cond + "," + ch + "," + source + "," + fmt_g17(a.mp_mean) + "," +
                   fmt_g17(a.mp_sd) + "," + fmt_g17(a.mpp_mean) + "," + fmt_g17(a.mpp_sd) + "," +
                   fmt_g17(a.mnp_mean) + "," + fmt_g17(a.mnp_sd) + "," +
                   std::to_string(a.cycle_count) + "\n";
        };
        for (const auto& c : rep.conditions) {
            for (std::size_t i = 0; i < c.power_channels.size(); ++i) {
                add(c.condition_key, c.power_channels[i], "pred", c.pred_power[i]);
                add(c.condition_key, c.power_channels[i], "gt", c.gt_power[i]);
            }
        }
        const std::string path = join_path(out_dir, "power_summary.csv");
        write_text_file_atomic(path, csv);
        written.push_back(path);
    }
    return written;
}

} // namespace

EvaluateOutcome cmd_evaluate(const RunConfig& cfg) {
    const EvaluateConfig& ecfg = cfg.evaluate;
    if (ecfg.trials_dir.empty()) fail(Err::InvalidArgument, "evaluate: trials_dir not set");
    if (!ecfg.inject_gt_as_pred && ecfg.model_file.empty())
        fail(Err::InvalidArgument, "evaluate: model_file not set");
    ensure_out_dir(cfg.out_dir);

    std::optional<TorqueModel> model;
    Provenance prov = make_provenance(cfg);
    if (!ecfg.inject_gt_as_pred) {
        model = load_model(ecfg.model_file);
        prov.model_crc32 = crc32_hex(model_payload_crc(*model));
    }

    CatalogResult result = catalog_directory(ecfg.trials_dir, ColumnMap::canonical(), cfg.jobs);
    EvaluationReport rep;
    rep.tag = ecfg.tag;
    rep.failures = result.failures;

    const std::vector<Trial> trials =
        select_trials(result, ecfg.subjects, ecfg.exclude_subjects, nullptr);

    std::map<std::string, std::vector<const Trial*>> by_condition;
    for (const Trial& t : trials) by_condition[t.condition.key()].push_back(&t);

    for (const auto& [key, group] : by_condition) {
        std::vector<std::vector<CycleProfile>> pred_cycles(kEvalChannels.size());
        std::vector<std::vector<CycleProfile>> gt_cycles(kEvalChannels.size());
        std::size_t trial_count = 0, cycle_count = 0;
        for (const Trial* raw : group) {
            const std::string tkey = trial_key(raw->subject_id, raw->condition);
            try {
                const Trial t = prepare_trial(*raw);
                const TrialProfiles tp =
                    evaluate_trial(t, model ? &*model : nullptr, ecfg);
                for (std::size_t c = 0; c < kEvalChannels.size(); ++c) {
                    pred_cycles[c].insert(pred_cycles[c].end(), tp.pred[c].begin(),
                                          tp.pred[c].end());
                    gt_cycles[c].insert(gt_cycles[c].end(), tp.gt[c].begin(), tp.gt[c].end());
                }
                ++trial_count;
                cycle_count += tp.cycles;
            } catch (const Error& e) {
                rep.failures.push_back({tkey, e.code(), e.what()});
            }
        }
        if (trial_count == 0) continue;

        const GaitCycleSet pred_set = cycle_set_from(std::move(pred_cycles), kWorkingRateHz);
        const GaitCycleSet gt_set = cycle_set_from(std::move(gt_cycles), kWorkingRateHz);
        const ConditionEvaluation ev = evaluate_condition(pred_set, gt_set, ecfg.eval);

        ConditionReport cr;
        cr.condition_key = key;
        cr.environment = group.front()->condition.environment();
        cr.trial_count = trial_count;
        cr.cycle_count = cycle_count;
        cr.correlations = ev.correlations;
        cr.hip_torque_r = 0.5 * (find_channel_r(ev.correlations, "hip_l") +
                                 find_channel_r(ev.correlations, "hip_r"));
        cr.knee_torque_r = 0.5 * (find_channel_r(ev.correlations, "knee_l") +
                                  find_channel_r(ev.correlations, "knee_r"));
        cr.hip_power_r = 0.5 * (find_channel_r(ev.correlations, "hip_l_power") +
                                find_channel_r(ev.correlations, "hip_r_power"));
        cr.knee_power_r = 0.5 * (find_channel_r(ev.correlations, "knee_l_power") +
                                 find_channel_r(ev.correlations, "knee_r_power"));
        cr.power_channels = ev.power_channels;
        cr.pred_power = ev.pred_power;
        cr.gt_power = ev.gt_power;
        rep.conditions.push_back(std::move(cr));

        for (std::size_t c = 0; c < kEvalChannels.size(); ++c) {
            ProfileBlock b;
            b.condition_key = key;
            b.channel = kEvalChannels[c];
            b.pred_mean = pred_set.mean_profile[c];
            b.pred_sd = pred_set.sd_profile[c];
            b.gt_mean = gt_set.mean_profile[c];
            b.gt_sd = gt_set.sd_profile[c];
            rep.profiles.push_back(std::move(b));
        }
    }
    if (rep.conditions.empty()) fail(Err::EmptyCatalog, "evaluate: no condition evaluated");

    for (const char* env : {"level", "incline", "decline"}) {
        std::vector<double> hip_t, knee_t, hip_p, knee_p;
        for (const auto& c : rep.conditions) {
            if (c.environment != env) continue;
            hip_t.push_back(c.hip_torque_r);
            knee_t.push_back(c.knee_torque_r);
            hip_p.push_back(c.hip_power_r);
            knee_p.push_back(c.knee_power_r);
        }
        if (hip_t.empty()) continue;
        EnvironmentReport er;
        er.environment = env;
        er.condition_count = hip_t.size();
        er.hip_torque_r = environment_average(hip_t);
        er.knee_torque_r = environment_average(knee_t);
        er.hip_power_r = environment_average(hip_p);
        er.knee_power_r = environment_average(knee_p);
        rep.environments.push_back(er);
    }

    EvaluateOutcome outcome;
    outcome.report = rep;
    outcome.report_json_path = join_path(cfg.out_dir, "report.json");
    write_text_file_atomic(outcome.report_json_path, report_to_json_text(rep, prov));
    outcome.written = write_report_files(rep, prov, cfg.out_dir);
    outcome.written.insert(outcome.written.begin(), outcome.report_json_path);
    return outcome;
}

// --- delay sweep -----------------------------------------------------------

namespace {

json sweep_to_json(const DelaySweepResult& r) {
    json levels = json::array();
    for (const auto& level : r.levels) {
        json joints = json::array();
        for (std::size_t j = 0; j < kJointCount; ++j) {
            joints.push_back(json{{"joint", kJointNames[j]},
                                  {"n", level.power[j].n},
                                  {"n_p", level.power[j].n_p},
                                  {"n_n", level.power[j].n_n},
                                  {"mp", level.power[j].mp_w_per_kg},
                                  {"mpp", level.power[j].mpp_w_per_kg},
                                  {"mnp", level.power[j].mnp_w_per_kg},
                                  {"mp_delta", level.mp_delta[j]},
                                  {"mpp_delta", level.mpp_delta[j]},
                                  {"mnp_delta", level.mnp_delta[j]},
                                  {"mean_power_profile",
                                   profile_to_json(level.mean_power_profile[j])}});
        }
        levels.push_back(json{{"delay_s", level.delay_s},
                              {"shift_samples", level.shift_samples},
                              {"joints", joints}});
    }
    json out{{"delays_s", r.delays_s}, {"levels", levels}, {"has_gt", r.has_gt}};
    if (r.has_gt) {
        json joints = json::array();
        for (std::size_t j = 0; j < kJointCount; ++j) {
            joints.push_back(json{{"joint", kJointNames[j]},
                                  {"n", r.gt_power[j].n},
                                  {"mp", r.gt_power[j].mp_w_per_kg},
                                  {"mpp", r.gt_power[j].mpp_w_per_kg},
                                  {"mnp", r.gt_power[j].mnp_w_per_kg},
                                  {"mean_power_profile",
                                   profile_to_json(r.gt_mean_power_profile[j])}});
        }
        out["gt"] = joints;
    }
    return out;
}

} // namespace

DelaySweepOutcome cmd_delay_sweep(const RunConfig& cfg) {
    const DelaySweepRunConfig& dcfg = cfg.delay_sweep;
    if (dcfg.trials_dir.empty()) fail(Err::InvalidArgument, "delay-sweep: trials_dir not set");
    if (dcfg.model_file.empty()) fail(Err::InvalidArgument, "delay-sweep: model_file not set");
    ensure_out_dir(cfg.out_dir);

    const TorqueModel model = load_model(dcfg.model_file);
    Provenance prov = make_provenance(cfg);
    prov.model_crc32 = crc32_hex(model_payload_crc(model));

    CatalogResult result = catalog_directory(dcfg.trials_dir, ColumnMap::canonical(), cfg.jobs);
    DelaySweepOutcome outcome;
    outcome.failures = result.failures;
    const std::vector<Trial> trials = select_trials(result, {}, {}, &dcfg.conditions);
    if (trials.empty())
        fail(Err::EmptyCatalog, "delay-sweep: no trial matches the condition filter");

    for (const Trial& raw : trials) {
        const std::string key = trial_key(raw.subject_id, raw.condition);
        try {
            const Trial t = prepare_trial(raw);
            TrialSweep sweep;
            sweep.trial_key = key;
            sweep.result = run_delay_sweep(t, model, dcfg.sweep);
            outcome.sweeps.push_back(std::move(sweep));
        } catch (const Error& e) {
            outcome.failures.push_back({key, e.code(), e.what()});
        }
    }
    if (outcome.sweeps.empty())
        fail(Err::PartialFailure, "delay-sweep: every matching trial failed");

    json j;
    j["provenance"] = provenance_to_json(prov);
    json sweeps = json::array();
    for (const auto& s : outcome.sweeps) {
        sweeps.push_back(json{{"trial", s.trial_key}, {"sweep", sweep_to_json(s.result)}});
    }
    j["sweeps"] = sweeps;
    j["failures"] = failures_to_json(outcome.failures);
    const std::string json_path = join_path(cfg.out_dir, "delay_sweep.json");
    write_text_file_atomic(json_path, j.dump(2) + "\n");
    outcome.written.push_back(json_path);

    const std::string header = provenance_csv_header(prov);
    {
        std::string csv = header +
                          "trial,source,delay_ms,joint,n,mp,mpp,mnp,"
                          "mp_delta,mpp_delta,mnp_delta\n";
        for (const auto& s : outcome.sweeps) {
            for (const auto& level : s.result.levels) {
                const std::string ms = fmt_g17(level.delay_s * 1000.0);
                for (std::size_t jnt = 0; jnt < kJointCount; ++jnt) {
                    csv += s.trial_key + ",pred," + ms + "," + kJointNames[jnt] + "," +
                           std::to_string(level.power[jnt].n) + "," +
                           fmt_g17(level.power[jnt].mp_w_per_kg) + "," +
                           fmt_g17(level.power[jnt].mpp_w_per_kg) + "," +
                           fmt_g17(level.power[jnt].mnp_w_per_kg) + "," +
                           fmt_g17(level.mp_delta[jnt]) + "," + fmt_g17(level.mpp_delta[jnt]) +
                           "," + fmt_g17(level.mnp_delta[jnt]) + "\n";
                }
            }
            if (s.result.has_gt) {
                for (std::size_t jnt = 0; jnt < kJointCount; ++jnt) {
                    csv += s.trial_key + ",gt,0," + kJointNames[jnt] + "," +
                           std::to_string(s.result.gt_power[jnt].n) + "," +
                           fmt_g17(s.result.gt_power[jnt].mp_w_per_kg) + "," +
                           fmt_g17(s.result.gt_power[jnt].mpp_w_per_kg) + "," +
                           fmt_g17(s.result.gt_power[jnt].mnp_w_per_kg) + ",,,\n";
                }
            }
        }
        const std::string path = join_path(cfg.out_dir, "delay_power.csv");
        write_text_file_atomic(path, csv);
        outcome.written.push_back(path);
    }
    {
        std::string csv = header + "trial,source,delay_ms,joint,cycle_pct,power\n";
        for (const auto& s : outcome.sweeps) {
            for (const auto& level : s.result.levels) {
                const std::string ms = fmt_g17(level.delay_s * 1000.0);
                for (std::size_t jnt = 0; jnt < kJointCount; ++jnt) {
                    for (std::size_t k = 0; k < kCyclePoints; ++k) {
                        csv += s.trial_key + ",pred," + ms + "," + kJointNames[jnt] + "," +
                               std::to_string(k) + "," +
                               fmt_g17(level.mean_power_profile[jnt][k]) + "\n";
                    }
                }
            }
            if (s.result.has_gt) {
                for (std::size_t jnt = 0; jnt < kJointCount; ++jnt) {
                    for (std::size_t k = 0; k < kCyclePoints; ++k) {
                        csv += s.trial_key + ",gt,0," + kJointNames[jnt] + "," +
                               std::to_string(k) + "," +
                               fmt_g17(s.result.gt_mean_power_profile[jnt][k]) + "\n";
                    }
                }
            }
        }
        const std::string path = join_path(cfg.out_dir, "delay_profiles.csv");
        write_text_file_atomic(path, csv);
        outcome.written.push_back(path);
    }
    return outcome;
}

// --- report ----------------------------------------------------------------

ReportOutcome cmd_report(const RunConfig& cfg) {
    if (cfg.report.report_json.empty()) fail(Err::InvalidArgument, "report: report_json not set");
    ensure_out_dir(cfg.out_dir);
    const auto [rep, prov] = report_from_json_text(read_text_file(cfg.report.report_json));
    ReportOutcome outcome;
    outcome.written = write_report_files(rep, prov, cfg.out_dir);
    return outcome;
}

} // namespace exotorq
