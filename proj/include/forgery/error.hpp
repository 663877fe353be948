#pragma once

#include <stdexcept>
#include <string>

namespace forgery {

enum class ErrorCode {
    UnsupportedFormat,
    CorruptStream,
    EncodeFailure,
    InvalidQuality,
    InvalidKernel,
    InvalidArgument,
    ShapeMismatch,
    TooSmall,
    EmptySet,
    LengthMismatch,
    DimMismatch,
    EmptyTrainingSet,
    KinkProximity,
    IoFailure,
    FormatVersionMismatch,
    ChecksumMismatch,
    MissingRoot,
    EmptyCorpus,
    DegenerateSplit,
    ImageTooSmall,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptStream: return "CorruptStream";
        case ErrorCode::EncodeFailure: return "EncodeFailure";
        case ErrorCode::InvalidQuality: return "InvalidQuality";
        case ErrorCode::InvalidKernel: return "InvalidKernel";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::KinkProximity: return "KinkProximity";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::MissingRoot: return "MissingRoot";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable error code; what() is prefixed with the code name.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace forgery
