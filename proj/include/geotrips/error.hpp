#pragma once

#include <stdexcept>
#include <string>

namespace geotrips {

/// Base of every fatal error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input does not look like the declared format (too many rejected lines, bad header).
class FormatMismatchError : public Error {
 public:
  using Error::Error;
};

/// A polygon or ring violates its structural invariants.
class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

/// Bad or missing configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition on its data does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace geotrips
