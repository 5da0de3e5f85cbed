#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtsesn {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid argument values: non-finite input, empty sequence, bad range.
struct PreconditionError : Error {
    using Error::Error;
};

/// Iterative algorithm exhausted its iteration budget.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, std::size_t order, std::size_t budget)
        : Error(what), order(order), budget(budget) {}
    std::size_t order;
    std::size_t budget;
};

/// Singular or rank-deficient system with no regularization to fall back on.
struct SingularityError : Error {
    using Error::Error;
};

/// Sampled recurrent matrix has (numerically) zero spectral radius.
struct DegenerateMatrixError : Error {
    using Error::Error;
};

/// Non-finite value encountered while evaluating dynamics.
struct NumericError : Error {
    using Error::Error;
};

/// Trajectory or prediction escaped to non-finite values.
struct DivergenceError : Error {
    DivergenceError(const std::string& what, std::size_t step) : Error(what), step(step) {}
    std::size_t step;
};

/// Target signal cannot normalize the requested metric.
struct DegenerateDenominatorError : Error {
    using Error::Error;
};

/// Bad experiment configuration: unknown keys, invalid combinations.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed CSV input.
struct CsvParseError : Error {
    CsvParseError(const std::string& what, std::size_t line) : Error(what), line(line) {}
    std::size_t line;
};

}  // namespace dtsesn
