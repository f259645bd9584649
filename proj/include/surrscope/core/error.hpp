#pragma once

#include <stdexcept>
#include <string>

namespace surrscope {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates its type invariant or an operation precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Feature dimensions of two operands disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Structured text could not be decoded into the requested type.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The black-box failed to answer a query (external process died, timed out,
/// or produced something other than a 0/1 label per row).
class BlackBoxError : public Error {
public:
    using Error::Error;
};

/// CSV ingestion failures. Each failure mode carries its own kind so callers
/// can distinguish them without parsing messages.
class DataError : public Error {
public:
    enum class Kind { file_not_found, non_numeric_cell, missing_column, malformed };

    DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace surrscope
