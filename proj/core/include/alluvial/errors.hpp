#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace alluvial {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (bad files, bad arguments).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numeric routine or sampling procedure could not produce a result.
class NumericError : public Error {
public:
    using Error::Error;
};

class FormatError : public DataError {
public:
    using DataError::DataError;
};

class InvalidDataset : public DataError {
public:
    using DataError::DataError;
};

class InvalidOrdering : public DataError {
public:
    using DataError::DataError;
};

class EmptyInput : public DataError {
public:
    using DataError::DataError;
};

class OutOfRange : public DataError {
public:
    using DataError::DataError;
};

class SingularDesign : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientData : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateVariable : public NumericError {
public:
    using NumericError::NumericError;
};

class LayoutOverflow : public NumericError {
public:
    using NumericError::NumericError;
};

/// Rejection sampling ran out of attempts. Carries how often each
/// constraint was the reason a candidate got thrown away.
class GenerationExhausted : public NumericError {
public:
    GenerationExhausted(const std::string& msg, std::map<std::string, int> counts)
        : NumericError(msg), failure_counts(std::move(counts)) {}

    std::map<std::string, int> failure_counts;
};

} // namespace alluvial
