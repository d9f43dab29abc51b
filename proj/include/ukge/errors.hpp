#pragma once

#include <stdexcept>

namespace ukge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed statement rejected in strict parsing mode.
struct ParseError : Error {
    using Error::Error;
};

// Corrupted, truncated, or foreign binary file.
struct FormatError : Error {
    using Error::Error;
};

// Invalid configuration value (dimension, ratio, flag combination).
struct ConfigError : Error {
    using Error::Error;
};

// Input data violates an operation precondition.
struct DataError : Error {
    using Error::Error;
};

// Training failure (non-finite loss).
struct TrainError : Error {
    using Error::Error;
};

}  // namespace ukge
