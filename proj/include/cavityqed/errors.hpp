// errors.hpp — exception types shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace cavityqed {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed grids, potentials, out-of-domain positions, config fields.
struct ConfigError : Error {
    using Error::Error;
};

// Solver failure, degeneracy, or a result that violates a numerical contract.
struct NumericError : Error {
    using Error::Error;
};

// A dense matrix or bond dimension would exceed the configured limit.
struct CapacityError : Error {
    using Error::Error;
};

// Operands with incompatible shapes.
struct DimensionError : Error {
    using Error::Error;
};

}  // namespace cavityqed
