#pragma once

#include <stdexcept>
#include <string>

namespace emodyn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or out-of-range input: bad files, bad schemas, bad config.
/// Maps to CLI exit code 1.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

/// Shape disagreement between operands.
class DimensionError : public InputError {
public:
    explicit DimensionError(const std::string& msg) : InputError(msg) {}
};

/// Numerical failure: singular systems, ill-conditioned inversions,
/// inconsistent statistics. Maps to CLI exit code 2.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Correlation requested on a zero-variance vector.
class UndefinedCorrelation : public NumericError {
public:
    explicit UndefinedCorrelation(const std::string& msg) : NumericError(msg) {}
};

}  // namespace emodyn
