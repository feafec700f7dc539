#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgeo {

enum class ErrorCode {
    ConePointQuery,
    OutOfChart,
    ZeroVector,
    ConePointHit,
    IntegratorFailure,
    NoConvergence,
    DegenerateJacobian,
    DepthBoundExceeded,
    BVPFailure,
    NotDifferentiable,
    Undefined,
    OrdinaryPair,
    ConePointVertex,
    Stalled,
    CollapsedTuple,
    EnumerationBound,
    NotRotating,
    HypothesisUnmet,
    BadBracket,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Domain error raised by every numerical routine in the toolkit. The CLI maps
// these to exit code 2.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kgeo
