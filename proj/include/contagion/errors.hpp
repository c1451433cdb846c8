#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contagion {

/// Base of every error raised by the library. The CLI maps IoError to exit
/// code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file layout: wrong header, missing or duplicate ids.
class SchemaError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// A record violates a balance-sheet invariant. `row()` is 1-based over data
/// rows (header excluded), or 0 when the record did not come from a file.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::size_t row = 0)
        : Error(row == 0 ? what : what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace contagion
