#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flash {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed files, invalid parameters, infeasible requests.
// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A manifest/CSV column contract was violated.
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A data row failed to parse or validate. Row numbers are 1-based data rows
// (the header is not counted).
class RowError : public ValidationError {
public:
    RowError(std::size_t row, const std::string& what)
        : ValidationError("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// A measurement could not be obtained (unknown configuration, failed or
// timed-out command, unparseable output). Exit code 2.
class MeasurementError : public Error {
public:
    using Error::Error;
};

// Linear algebra failure, e.g. a kernel matrix that stays indefinite after
// jitter escalation. Exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace flash
