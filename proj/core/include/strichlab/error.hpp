#pragma once

#include <stdexcept>
#include <string>

namespace strichlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed parameters outside an operation's documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The dispersion setup has an empty decay window (no generalized estimates).
class UnsupportedSetup : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure could not produce a meaningful result (degenerate fit,
/// mismatched slabs, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace strichlab
