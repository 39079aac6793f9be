#pragma once

#include <stdexcept>
#include <string>

namespace thinprobe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated precondition on an argument (bad eps, out-of-range exponent, ...).
struct DomainError : Error {
    using Error::Error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

struct HypothesisError : Error {
    using Error::Error;
};

struct InsufficientPointsError : Error {
    using Error::Error;
};

}  // namespace thinprobe
