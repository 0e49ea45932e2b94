#pragma once

#include <stdexcept>
#include <string>

namespace skorohod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (times off [0,1], negative variance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A degree or size limit was exceeded; the caller must truncate first.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file or text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An internal identity failed (non-PSD covariance, quadrature self-check, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but not supported by this routine.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace skorohod
