/**
 * @file main.cpp
 * @brief exotorq command line: convert, synth, train, infer, evaluate,
 *        delay-sweep, report.
 *
 * The CLI assembles a run-config JSON document (config file, then flag
 * overrides) and drives everything through the C API. Exit codes: 0 success,
 * 1 failure, 2 partial failure (some items succeeded, see the summary).
 */

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "exotorq/exotorq.h"

using json = nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path, const std::string& what) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw CLI::ValidationError(what + ": " + e.what());
    }
}

struct Flags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int jobs = 0;

    std::string raw_dir;
    std::string column_map_file;
    std::string spec_file;
    std::vector<std::string> subjects;
    std::string trials_dir;
    std::string model_file;
    int epochs = 0;
    int batch_size = 0;
    double learning_rate = 0.0;
    double w_reg = 0.0;
    std::string trial_csv;
    double delay_feature_s = 0.0;
    std::string tag;
    bool inject_gt = false;
    bool lag_sweep = false;
    bool per_cycle_corr = false;
    std::vector<std::string> exclude_subjects;
    std::vector<double> delays_s;
    bool all_conditions = false;
    bool co_vary = false;
    std::string report_json;
};

void add_global_options(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "Run-config JSON file")
        ->envname("EXOTORQ_CONFIG");
    sub->add_option("--seed", f.seed, "Master seed for all randomness");
    sub->add_option("--out", f.out_dir, "Output directory");
    sub->add_option("--jobs", f.jobs, "Parallel file-parsing jobs");
}

int run(const std::string& verb, const json& cfg) {
    const std::string text = cfg.dump(2);
    char* summary = nullptr;
    const int rc = exotorq_run(verb.c_str(), text.c_str(), &summary);
    if (rc != EXOTORQ_OK) {
        std::fprintf(stderr, "error (%s): %s\n", exotorq_status_name(rc), exotorq_last_error());
        return 1;
    }
    bool partial = false;
    if (summary) {
        std::fputs(summary, stdout);
        try {
            const json s = json::parse(summary);
            partial = s.contains("failures") && !s["failures"].empty();
        } catch (const json::exception&) {
            partial = false;
        }
        exotorq_string_free(summary);
    }
    return partial ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exotorq: assistance-torque inference and gait-validation toolkit"};
    app.set_version_flag("--version", std::string(exotorq_version()));
    app.require_subcommand(1);

    Flags f;

    CLI::App* convert = app.add_subcommand("convert", "Resample raw trials into canonical CSVs");
    convert->add_option("--raw-dir", f.raw_dir, "Directory of source CSV + sidecar pairs");
    convert->add_option("--column-map", f.column_map_file, "Column-map JSON file");

    CLI::App* synth = app.add_subcommand("synth", "Generate synthetic oracle trials");
    synth->add_option("spec", f.spec_file, "Synth spec JSON file");
    synth->add_option("--subjects", f.subjects, "Subject ids to generate")->delimiter(',');

    CLI::App* train = app.add_subcommand("train", "Train the torque policy on canonical trials");
    train->add_option("--trials-dir", f.trials_dir, "Directory of canonical trials");
    train->add_option("--epochs", f.epochs, "Training epochs");
    train->add_option("--batch-size", f.batch_size, "Mini-batch size");
    train->add_option("--learning-rate", f.learning_rate, "Learning rate");
    train->add_option("--w-reg", f.w_reg, "Torque-magnitude regularization weight");

    CLI::App* infer = app.add_subcommand("infer", "Run a model over one canonical trial");
    infer->add_option("--trial", f.trial_csv, "Canonical trial CSV");
    infer->add_option("--model", f.model_file, "Model file");
    infer->add_option("--delay-feature", f.delay_feature_s, "Delay input value in seconds");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Correlations and power vs ground truth");
    evaluate->add_option("--trials-dir", f.trials_dir, "Directory of canonical trials");
    evaluate->add_option("--model", f.model_file, "Model file");
    evaluate->add_option("--tag", f.tag, "Row tag, e.g. mismatched");
    evaluate->add_flag("--inject-gt", f.inject_gt, "Use GT as the prediction (pipeline check)");
    evaluate->add_flag("--lag-sweep", f.lag_sweep, "Report max r over +-20% cycle lags");
    evaluate->add_flag("--per-cycle-corr", f.per_cycle_corr,
                       "Average per-cycle correlations instead of mean-profile correlation");
    evaluate->add_option("--subjects", f.subjects, "Only these subjects")->delimiter(',');
    evaluate->add_option("--exclude-subjects", f.exclude_subjects, "Skip these subjects")
        ->delimiter(',');
    evaluate->add_option("--delay-feature", f.delay_feature_s, "Delay input value in seconds");

    CLI::App* sweep = app.add_subcommand("delay-sweep", "Inject output delays and compare power");
    sweep->add_option("--trials-dir", f.trials_dir, "Directory of canonical trials");
    sweep->add_option("--model", f.model_file, "Model file");
    sweep->add_option("--delays", f.delays_s, "Delays in seconds (0 is always added)")
        ->delimiter(',');
    sweep->add_flag("--all-conditions", f.all_conditions,
                    "Sweep every trial instead of the default walking conditions");
    sweep->add_flag("--co-vary", f.co_vary, "Also add the injected delay to the model input");

    CLI::App* report = app.add_subcommand("report", "Re-emit tables from a report.json");
    report->add_option("report_json", f.report_json, "report.json from evaluate");

    for (CLI::App* sub : {convert, synth, train, infer, evaluate, sweep, report})
        add_global_options(sub, f);

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const std::string verb = sub->get_name();

    json cfg = json::object();
    try {
        if (!f.config_path.empty()) cfg = parse_json_file(f.config_path, "config");

        if (sub->count("--seed")) cfg["seed"] = f.seed;
        if (sub->count("--out")) cfg["out_dir"] = f.out_dir;
        if (sub->count("--jobs")) cfg["jobs"] = f.jobs;

        if (verb == "convert") {
            if (sub->count("--raw-dir")) cfg["convert"]["raw_dir"] = f.raw_dir;
            if (sub->count("--column-map"))
                cfg["convert"]["column_map"] = parse_json_file(f.column_map_file, "column map");
        } else if (verb == "synth") {
            if (sub->count("spec")) cfg["synth"]["spec"] = parse_json_file(f.spec_file, "spec");
            if (sub->count("--subjects")) cfg["synth"]["subjects"] = f.subjects;
        } else if (verb == "train") {
            if (sub->count("--trials-dir")) cfg["train"]["trials_dir"] = f.trials_dir;
            if (sub->count("--epochs")) cfg["train"]["epochs"] = f.epochs;
            if (sub->count("--batch-size")) cfg["train"]["batch_size"] = f.batch_size;
            if (sub->count("--learning-rate")) cfg["train"]["learning_rate"] = f.learning_rate;
            if (sub->count("--w-reg")) cfg["train"]["w_reg"] = f.w_reg;
        } else if (verb == "infer") {
            if (sub->count("--trial")) cfg["infer"]["trial_csv"] = f.trial_csv;
            if (sub->count("--model")) cfg["infer"]["model_file"] = f.model_file;
            if (sub->count("--delay-feature"))
                cfg["infer"]["delay_feature_s"] = f.delay_feature_s;
        } else if (verb == "evaluate") {
            if (sub->count("--trials-dir")) cfg["evaluate"]["trials_dir"] = f.trials_dir;
            if (sub->count("--model")) cfg["evaluate"]["model_file"] = f.model_file;
            if (sub->count("--tag")) cfg["evaluate"]["tag"] = f.tag;
            if (f.inject_gt) cfg["evaluate"]["inject_gt_as_pred"] = true;
            if (f.lag_sweep) cfg["evaluate"]["lag_sweep"] = true;
            if (f.per_cycle_corr) cfg["evaluate"]["per_cycle_correlation"] = true;
            if (sub->count("--subjects")) cfg["evaluate"]["subjects"] = f.subjects;
            if (sub->count("--exclude-subjects"))
                cfg["evaluate"]["exclude_subjects"] = f.exclude_subjects;
            if (sub->count("--delay-feature"))
                cfg["evaluate"]["delay_feature_s"] = f.delay_feature_s;
        } else if (verb == "delay-sweep") {
            if (sub->count("--trials-dir")) cfg["delay_sweep"]["trials_dir"] = f.trials_dir;
            if (sub->count("--model")) cfg["delay_sweep"]["model_file"] = f.model_file;
            if (sub->count("--delays")) cfg["delay_sweep"]["delays_s"] = f.delays_s;
            if (f.all_conditions) cfg["delay_sweep"]["conditions"] = json::array();
            if (f.co_vary) cfg["delay_sweep"]["co_vary_input_delay"] = true;
        } else if (verb == "report") {
            if (sub->count("report_json")) cfg["report"]["report_json"] = f.report_json;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }

    return run(verb, cfg);
}
