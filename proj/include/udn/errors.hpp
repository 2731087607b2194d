#pragma once

#include <stdexcept>
#include <string>

namespace udn {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative method (series, quadrature, search) failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A computed quantity left its admissible range, which indicates a bug
/// rather than a bad input.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace udn
