#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlof {

/// Base of every error the library reports to callers. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error("line " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Data that the LOF definitions cannot score: all points identical, or a
/// neighbourhood whose mean reachability distance is zero.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// A simulation would need more qubits than the exact backend supports.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A density ratio exceeded the advice constant E, so the LOF rotation
/// angle would be out of range.
class RatioBoundError : public Error {
public:
    using Error::Error;
};

} // namespace qlof
