#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ffcdnn {

// Input problems (bad arguments, malformed files) map to exit code 2 in the
// CLI; NumericError maps to exit code 3.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : InvalidArgument(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CoverageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InsufficientDataError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ratio with a vanishing denominator (OSAVI ~ 0, zero RSR integral, ...).
class DegenerateError : public NumericError {
public:
    using NumericError::NumericError;
};

/// WDVI at or above the inversion asymptote.
class SaturationError : public NumericError {
public:
    using NumericError::NumericError;
};

class NonDifferentiableError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Operation called in the wrong lifecycle state (e.g. backward before forward).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ffcdnn
