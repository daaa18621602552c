#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hftsvr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& what = "matrix is not positive definite")
        : Error(what) {}
};

class DataError : public Error {
public:
    using Error::Error;
};

/// CSV parse failure; row and column are 1-based, row counts the header.
class ParseError : public DataError {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& detail)
        : DataError("parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(column) + ": " + detail),
          row_(row), column_(column) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class MissingHeader : public DataError {
public:
    using DataError::DataError;
};

class InconsistentArity : public DataError {
public:
    using DataError::DataError;
};

class DegenerateSplit : public DataError {
public:
    using DataError::DataError;
};

class EmptySet : public DataError {
public:
    using DataError::DataError;
};

class RaggedDimensions : public DataError {
public:
    using DataError::DataError;
};

class DegenerateDomain : public DataError {
public:
    using DataError::DataError;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class KernelSpreadUnsupported : public Error {
public:
    using Error::Error;
};

class InvalidDivisor : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Residuals are constant; there is nothing left for another layer to fit.
class ZeroVariance : public TrainingError {
public:
    using TrainingError::TrainingError;
};

class EmptyPrunedSet : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ZeroVarianceTargets : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaVersionMismatch : public Error {
public:
    using Error::Error;
};

class CorruptModel : public Error {
public:
    using Error::Error;
};

}  // namespace hftsvr
