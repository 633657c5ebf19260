#include "freqlab/error.hpp"

namespace freqlab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDomain: return "InvalidDomain";
        case ErrorCode::TooCoarse: return "TooCoarse";
        case ErrorCode::BoundaryViolation: return "BoundaryViolation";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::Instability: return "Instability";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DegenerateNorm: return "DegenerateNorm";
        case ErrorCode::DegenerateH: return "DegenerateH";
        case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::ZeroObservation: return "ZeroObservation";
        case ErrorCode::ZeroInitialData: return "ZeroInitialData";
        case ErrorCode::InsufficientFamily: return "InsufficientFamily";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace freqlab
