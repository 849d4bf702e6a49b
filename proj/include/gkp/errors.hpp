#pragma once

#include <stdexcept>
#include <string>

namespace gkp {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required input file is missing or unreadable.
struct LoadError : Error {
    using Error::Error;
};

// An input file exists but its contents violate the expected format.
struct FormatError : Error {
    using Error::Error;
};

// A configuration value is invalid or inconsistent.
struct ConfigError : Error {
    using Error::Error;
};

// A caller broke an operation's precondition (shape mismatch, bad index, ...).
struct ContractViolation : Error {
    using Error::Error;
};

// Numerical failure during training (NaN loss and similar).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace gkp
