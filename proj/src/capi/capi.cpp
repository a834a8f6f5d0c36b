/**
 * @file capi.cpp
 * @brief extern-C surface over the core library: opaque model handles, the
 *        verb runner, and scalar metric helpers.
 */

#include "exotorq/exotorq.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "errors.hpp"
#include "json.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "pipeline.hpp"

using namespace exotorq;
using json = nlohmann::json;

struct exotorq_model {
    TorqueModel model;
};

namespace {

thread_local std::string g_last_error;

// The C enum mirrors Err one-to-one; keep both sides pinned.
static_assert(int(Err::None) == EXOTORQ_OK);
static_assert(int(Err::InvalidArgument) == EXOTORQ_ERR_INVALID_ARGUMENT);
static_assert(int(Err::TooShort) == EXOTORQ_ERR_TOO_SHORT);
static_assert(int(Err::ShapeError) == EXOTORQ_ERR_SHAPE);
static_assert(int(Err::NoCyclesFound) == EXOTORQ_ERR_NO_CYCLES_FOUND);
static_assert(int(Err::InvalidSpec) == EXOTORQ_ERR_INVALID_SPEC);
static_assert(int(Err::Internal) == EXOTORQ_ERR_INTERNAL);

template <typename F>
int guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return EXOTORQ_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return int(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EXOTORQ_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return EXOTORQ_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json failures_json(const std::vector<CatalogFailure>& failures) {
    json arr = json::array();
    for (const auto& f : failures)
        arr.push_back(json{{"path", f.path}, {"code", err_name(f.code)}, {"message", f.message}});
    return arr;
}

json written_json(const std::vector<std::string>& written) {
    json arr = json::array();
    for (const auto& w : written) arr.push_back(w);
    return arr;
}

json run_verb(const std::string& verb, const RunConfig& cfg) {
    json summary;
    summary["verb"] = verb;
    if (verb == "convert") {
        const ConvertOutcome o = cmd_convert(cfg);
        summary["written"] = written_json(o.written);
        summary["failures"] = failures_json(o.failures);
    } else if (verb == "synth") {
        const SynthOutcome o = cmd_synth(cfg);
        summary["written"] = written_json(o.written);
        summary["failures"] = json::array();
    } else if (verb == "train") {
        const TrainOutcome o = cmd_train(cfg);
        summary["written"] = written_json({o.model_path, o.loss_csv_path});
        summary["model_path"] = o.model_path;
        summary["model_crc32"] = o.model_crc32;
        summary["initial_loss"] = o.initial_loss;
        summary["final_loss"] = o.final_loss;
        summary["sample_count"] = o.sample_count;
        summary["failures"] = failures_json(o.failures);
    } else if (verb == "infer") {
        const InferOutcome o = cmd_infer(cfg);
        summary["written"] = written_json({o.csv_path});
        summary["rows"] = o.rows;
        summary["failures"] = json::array();
    } else if (verb == "evaluate") {
        const EvaluateOutcome o = cmd_evaluate(cfg);
        summary["written"] = written_json(o.written);
        summary["report_json"] = o.report_json_path;
        summary["condition_count"] = o.report.conditions.size();
        summary["failures"] = failures_json(o.report.failures);
    } else if (verb == "delay-sweep") {
        const DelaySweepOutcome o = cmd_delay_sweep(cfg);
        summary["written"] = written_json(o.written);
        summary["trial_count"] = o.sweeps.size();
        summary["failures"] = failures_json(o.failures);
    } else if (verb == "report") {
        const ReportOutcome o = cmd_report(cfg);
        summary["written"] = written_json(o.written);
        summary["failures"] = json::array();
    } else {
        fail(Err::InvalidArgument, "unknown verb '" + verb + "'");
    }
    return summary;
}

} // namespace

extern "C" {

const char* exotorq_version(void) { return kToolVersion; }

const char* exotorq_status_name(int status) {
    if (status < int(Err::None) || status > int(Err::Internal)) return "Unknown";
    return err_name(static_cast<Err>(status));
}

const char* exotorq_last_error(void) { return g_last_error.c_str(); }

void exotorq_string_free(char* s) { std::free(s); }

int exotorq_run(const char* verb, const char* config_json, char** out_summary_json) {
    if (out_summary_json) *out_summary_json = nullptr;
    return guarded([&] {
        if (!verb || !config_json) fail(Err::InvalidArgument, "verb/config must be non-null");
        const RunConfig cfg = RunConfig::from_json(config_json);
        const json summary = run_verb(verb, cfg);
        if (out_summary_json) *out_summary_json = dup_string(summary.dump(2) + "\n");
    });
}

exotorq_model* exotorq_model_load(const char* path) {
    exotorq_model* handle = nullptr;
    const int rc = guarded([&] {
        if (!path) fail(Err::InvalidArgument, "path must be non-null");
        handle = new exotorq_model{load_model(path)};
    });
    if (rc != EXOTORQ_OK) return nullptr;
    return handle;
}

void exotorq_model_free(exotorq_model* model) { delete model; }

int exotorq_model_input_dim(const exotorq_model* model) {
    return model ? model->model.input_dim() : 0;
}

int exotorq_model_output_dim(const exotorq_model* model) {
    return model ? model->model.output_dim() : 0;
}

unsigned long exotorq_model_crc32(const exotorq_model* model) {
    if (!model) return 0;
    unsigned long crc = 0;
    const int rc = guarded([&] { crc = model_payload_crc(model->model); });
    return rc == EXOTORQ_OK ? crc : 0;
}

int exotorq_model_forward(const exotorq_model* model, const double* features, size_t n_features,
                          double* out_torque, size_t n_out) {
    return guarded([&] {
        if (!model || !features || !out_torque)
            fail(Err::InvalidArgument, "model/features/out_torque must be non-null");
        if (n_features != size_t(model->model.input_dim()))
            fail(Err::DimensionMismatch,
                 "expected " + std::to_string(model->model.input_dim()) + " features, got " +
                     std::to_string(n_features));
        if (n_out != size_t(model->model.output_dim()))
            fail(Err::DimensionMismatch,
                 "expected room for " + std::to_string(model->model.output_dim()) +
                     " outputs, got " + std::to_string(n_out));
        Eigen::MatrixXd in(model->model.input_dim(), 1);
        for (int f = 0; f < model->model.input_dim(); ++f) in(f, 0) = features[f];
        const Eigen::MatrixXd out = forward_batch(model->model, in);
        for (int j = 0; j < model->model.output_dim(); ++j) out_torque[j] = out(j, 0);
    });
}

int exotorq_power_summary(const double* p, size_t n, double* mp, double* mpp, double* mnp) {
    return guarded([&] {
        if (!p) fail(Err::InvalidArgument, "p must be non-null");
        const PowerSummary s = power_summary(std::vector<double>(p, p + n));
        if (mp) *mp = s.mp_w_per_kg;
        if (mpp) *mpp = s.mpp_w_per_kg;
        if (mnp) *mnp = s.mnp_w_per_kg;
    });
}

int exotorq_cross_correlation(const double* a, const double* b, size_t n, double* r) {
    return guarded([&] {
        if (!a || !b || !r) fail(Err::InvalidArgument, "a/b/r must be non-null");
        *r = cross_correlation(std::vector<double>(a, a + n), std::vector<double>(b, b + n));
    });
}

} // extern "C"
