#pragma once

#include <stdexcept>
#include <string>

namespace gainlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix that must be a covariance failed symmetry or Cholesky validation.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Backtracking shrank the step below the floor without satisfying Armijo.
class LineSearchFailed : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gainlab
