/**
 * @file errors.cpp
 */

#include "errors.hpp"

namespace exotorq {

const char* err_name(Err code) {
    switch (code) {
    case Err::None: return "None";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::Io: return "Io";
    case Err::Parse: return "Parse";
    case Err::MissingColumn: return "MissingColumn";
    case Err::NonMonotoneTime: return "NonMonotoneTime";
    case Err::NonFiniteSample: return "NonFiniteSample";
    case Err::IrregularSampling: return "IrregularSampling";
    case Err::DuplicateTrialKey: return "DuplicateTrialKey";
    case Err::EmptyCatalog: return "EmptyCatalog";
    case Err::TooShort: return "TooShort";
    case Err::NonPositiveMax: return "NonPositiveMax";
    case Err::DelayExceedsSeries: return "DelayExceedsSeries";
    case Err::RateMismatch: return "RateMismatch";
    case Err::MissingVelocities: return "MissingVelocities";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::EmptyBatch: return "EmptyBatch";
    case Err::InsufficientSamples: return "InsufficientSamples";
    case Err::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Err::ChecksumMismatch: return "ChecksumMismatch";
    case Err::ShapeError: return "ShapeError";
    case Err::NoCyclesFound: return "NoCyclesFound";
    case Err::DegenerateSignal: return "DegenerateSignal";
    case Err::SpanTooShort: return "SpanTooShort";
    case Err::EmptySet: return "EmptySet";
    case Err::DegeneratePrediction: return "DegeneratePrediction";
    case Err::ZeroVariance: return "ZeroVariance";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::EmptySeries: return "EmptySeries";
    case Err::ChannelMismatch: return "ChannelMismatch";
    case Err::InvalidSpec: return "InvalidSpec";
    case Err::OutOfRange: return "OutOfRange";
    case Err::PartialFailure: return "PartialFailure";
    case Err::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace exotorq
