#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqlab {

enum class ErrorCode {
    InvalidDomain,
    TooCoarse,
    BoundaryViolation,
    ShapeMismatch,
    LinearSolveFailure,
    Instability,
    IndexOutOfRange,
    DegenerateNorm,
    DegenerateH,
    TimeOutOfRange,
    InvalidGeometry,
    ZeroObservation,
    ZeroInitialData,
    InsufficientFamily,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Error carrying a machine-readable code; the message names the violated condition.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace freqlab
