/**
 * @file errors.hpp
 * @brief Error taxonomy shared by the core library and the C API.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace exotorq {

// Stable error codes. The C API exposes these one-to-one, so the order is
// append-only once released.
enum class Err : int {
    None = 0,
    InvalidArgument,
    Io,
    Parse,
    // ingest
    MissingColumn,
    NonMonotoneTime,
    NonFiniteSample,
    IrregularSampling,
    DuplicateTrialKey,
    EmptyCatalog,
    // signal
    TooShort,
    NonPositiveMax,
    DelayExceedsSeries,
    // model
    RateMismatch,
    MissingVelocities,
    DimensionMismatch,
    EmptyBatch,
    InsufficientSamples,
    SchemaVersionMismatch,
    ChecksumMismatch,
    ShapeError,
    // gait
    NoCyclesFound,
    DegenerateSignal,
    SpanTooShort,
    EmptySet,
    // metrics
    DegeneratePrediction,
    ZeroVariance,
    LengthMismatch,
    EmptySeries,
    ChannelMismatch,
    // synth
    InvalidSpec,
    OutOfRange,
    // orchestration
    PartialFailure,
    Internal,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
public:
    Error(Err code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Err code() const noexcept { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

} // namespace exotorq
