#pragma once

#include <stdexcept>
#include <string>

namespace rcbd {

// Error taxonomy shared across the library. The CLI maps these onto
// process exit codes (see tools/rcbd_cli.cpp).

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input shape/content problems (bad CSV, too few rows/columns).
struct FormatError : Error {
    using Error::Error;
};
struct DimensionError : FormatError {
    using FormatError::FormatError;
};

// Statistical domain violations.
struct TiesError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct DegenerateError : Error {
    using Error::Error;
};
struct SeriesError : Error {
    using Error::Error;
};
struct NotAttainableError : Error {
    using Error::Error;
};

// Exact-enumeration resource limits.
struct CapacityError : Error {
    using Error::Error;
};

}  // namespace rcbd
