#pragma once

#include <stdexcept>
#include <string>

namespace uiobs {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent matrix/vector dimensions or malformed system data.
struct DimensionError : Error {
    using Error::Error;
};

/// Right-hand side not contained in the row space of the coefficient matrix.
struct InconsistentError : Error {
    using Error::Error;
};

/// A matrix that must be invertible is (numerically) singular.
struct SingularError : Error {
    using Error::Error;
};

/// The system fails the strong observability rank condition.
struct NotStronglyObservableError : Error {
    using Error::Error;
};

/// Iterative decomposition exceeded its defensive iteration bound.
struct NonConvergenceError : Error {
    using Error::Error;
};

/// Transformed matrices violate the normal-form sparsity pattern.
struct StructuralValidationError : Error {
    using Error::Error;
};

/// Simulation state magnitude exceeded the blow-up threshold.
struct DivergedError : Error {
    using Error::Error;
};

/// Requested configuration is outside the supported range.
struct UnsupportedError : Error {
    using Error::Error;
};

/// Malformed input file (JSON syntax or schema).
struct ParseError : Error {
    using Error::Error;
};

}  // namespace uiobs
