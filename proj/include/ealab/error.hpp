#pragma once

#include <stdexcept>
#include <string>

namespace ealab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An id or index outside its valid range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Malformed input (not a cycle, bad file, bad parameter value).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A contractible-cycle operation was asked about a cycle that winds the torus.
class NoInteriorError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Caller broke a precondition between two otherwise valid arguments.
class ContractError : public Error {
public:
    using Error::Error;
};

/// An enumeration or table would exceed its hard cap.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Parameters that are individually valid but jointly inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A bounded simulation ran out of time, events, or intervals.
class BoundedRunError : public Error {
public:
    using Error::Error;
};

/// An internal invariant failed. Signals a bug, not bad input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace ealab
