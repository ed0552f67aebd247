#pragma once

#include <stdexcept>
#include <string>

namespace scsl {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed records, violated preconditions, bad flags.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A remote scorer answered with something outside the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// I/O or transport failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scsl
