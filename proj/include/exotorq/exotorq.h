/**
 * @file exotorq.h
 * @brief C API of the exotorq torque-inference and validation toolkit.
 *
 * All functions return an exotorq_status (0 on success) unless documented
 * otherwise; on failure exotorq_last_error() carries a message for the
 * calling thread. Strings returned through char** are heap-allocated and
 * must be released with exotorq_string_free().
 */

#ifndef EXOTORQ_H
#define EXOTORQ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Stable status codes, mirrored one-to-one from the core error taxonomy. */
typedef enum exotorq_status {
    EXOTORQ_OK = 0,
    EXOTORQ_ERR_INVALID_ARGUMENT = 1,
    EXOTORQ_ERR_IO = 2,
    EXOTORQ_ERR_PARSE = 3,
    EXOTORQ_ERR_MISSING_COLUMN = 4,
    EXOTORQ_ERR_NON_MONOTONE_TIME = 5,
    EXOTORQ_ERR_NON_FINITE_SAMPLE = 6,
    EXOTORQ_ERR_IRREGULAR_SAMPLING = 7,
    EXOTORQ_ERR_DUPLICATE_TRIAL_KEY = 8,
    EXOTORQ_ERR_EMPTY_CATALOG = 9,
    EXOTORQ_ERR_TOO_SHORT = 10,
    EXOTORQ_ERR_NON_POSITIVE_MAX = 11,
    EXOTORQ_ERR_DELAY_EXCEEDS_SERIES = 12,
    EXOTORQ_ERR_RATE_MISMATCH = 13,
    EXOTORQ_ERR_MISSING_VELOCITIES = 14,
    EXOTORQ_ERR_DIMENSION_MISMATCH = 15,
    EXOTORQ_ERR_EMPTY_BATCH = 16,
    EXOTORQ_ERR_INSUFFICIENT_SAMPLES = 17,
    EXOTORQ_ERR_SCHEMA_VERSION_MISMATCH = 18,
    EXOTORQ_ERR_CHECKSUM_MISMATCH = 19,
    EXOTORQ_ERR_SHAPE = 20,
    EXOTORQ_ERR_NO_CYCLES_FOUND = 21,
    EXOTORQ_ERR_DEGENERATE_SIGNAL = 22,
    EXOTORQ_ERR_SPAN_TOO_SHORT = 23,
    EXOTORQ_ERR_EMPTY_SET = 24,
    EXOTORQ_ERR_DEGENERATE_PREDICTION = 25,
    EXOTORQ_ERR_ZERO_VARIANCE = 26,
    EXOTORQ_ERR_LENGTH_MISMATCH = 27,
    EXOTORQ_ERR_EMPTY_SERIES = 28,
    EXOTORQ_ERR_CHANNEL_MISMATCH = 29,
    EXOTORQ_ERR_INVALID_SPEC = 30,
    EXOTORQ_ERR_OUT_OF_RANGE = 31,
    EXOTORQ_ERR_PARTIAL_FAILURE = 32,
    EXOTORQ_ERR_INTERNAL = 33
} exotorq_status;

/* Library version string, e.g. "exotorq 1.0.0". Static storage, do not free. */
const char* exotorq_version(void);

/* Stable name of a status code ("InvalidArgument", ...). Static storage. */
const char* exotorq_status_name(int status);

/* Message of the last failure on the calling thread; empty string if none. */
const char* exotorq_last_error(void);

/* Releases a string returned through a char** out parameter. NULL is a no-op. */
void exotorq_string_free(char* s);

/*
 * Runs one pipeline command. `verb` is one of: convert, synth, train, infer,
 * evaluate, delay-sweep, report. `config_json` is a full run-config document
 * (unknown keys are rejected). On success *out_summary_json (optional) gets a
 * JSON summary of what was produced, including any per-item failures of a
 * partial run. Partial runs return EXOTORQ_OK with a non-empty "failures"
 * array in the summary; total failures return a nonzero status.
 */
int exotorq_run(const char* verb, const char* config_json, char** out_summary_json);

/* --- Model handle -------------------------------------------------------- */

typedef struct exotorq_model exotorq_model;

/* Loads a model file; NULL on failure (see exotorq_last_error). */
exotorq_model* exotorq_model_load(const char* path);
void exotorq_model_free(exotorq_model* model);

/* Input/output width of the loaded network. */
int exotorq_model_input_dim(const exotorq_model* model);
int exotorq_model_output_dim(const exotorq_model* model);

/* CRC-32 of the parameter payload, as written in provenance headers. */
unsigned long exotorq_model_crc32(const exotorq_model* model);

/*
 * Single forward pass. `features` holds input_dim values (33 for the
 * standard policy: 4 time steps x 4 joints x {angle, velocity}, oldest step
 * first, then the delay scalar). `out_torque` receives output_dim normalized
 * torques in [-1, 1].
 */
int exotorq_model_forward(const exotorq_model* model, const double* features, size_t n_features,
                          double* out_torque, size_t n_out);

/* --- Metric helpers ------------------------------------------------------- */

/*
 * Mean / mean-positive / mean-negative power of a series. All three share the
 * divisor n, so mp = mpp + mnp holds exactly. Any output pointer may be NULL.
 */
int exotorq_power_summary(const double* p, size_t n, double* mp, double* mpp, double* mnp);

/* Zero-lag normalized correlation of two equal-length vectors. */
int exotorq_cross_correlation(const double* a, const double* b, size_t n, double* r);

#ifdef __cplusplus
}
#endif

#endif /* EXOTORQ_H */
