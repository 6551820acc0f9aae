#pragma once

#include <stdexcept>
#include <string>

namespace atsh {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A function argument violates a documented precondition.
struct InvalidParams : Error {
    using Error::Error;
};

// A tableau denominator factor vanishes at the requested nu.
struct SingularCoefficient : Error {
    using Error::Error;
};

// Exact starting values were requested for a problem without a closed-form solution.
struct ExactUnavailable : Error {
    using Error::Error;
};

// The two-step recurrence produced a non-finite value (blow-up).
struct NonFiniteState : Error {
    using Error::Error;
};

// Phase lag is undefined at this point (P <= 0 or |S/(2 sqrt(P))| > 1).
struct OutsideDomain : Error {
    using Error::Error;
};

// A log-log slope did not snap to an integer order.
struct FitFailed : Error {
    using Error::Error;
};

// The fine-step reference trajectories disagree beyond tolerance.
struct OracleNotConverged : Error {
    using Error::Error;
};

// A sweep configuration file or flag set could not be parsed.
struct ConfigError : Error {
    using Error::Error;
};

// A file could not be read or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace atsh
