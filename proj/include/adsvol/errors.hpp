#pragma once

#include <stdexcept>
#include <string>

namespace adsvol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (CSV, JSON, config).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A precondition on arguments or parameters was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Derivative evaluated at the K_min singularity.
class SingularPointError : public Error {
public:
    using Error::Error;
};

/// Option price outside the no-arbitrage band, so no implied vol exists.
class OutOfBandError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or a failed factorization.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace adsvol
