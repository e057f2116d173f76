#pragma once

#include <stdexcept>
#include <string>

namespace minkval {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad arguments, unparsable files, unsupported dimension.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Mathematically invalid request, e.g. a degree outside the table or an
/// atomic measure on a path that needs a continuous density.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not reach the requested accuracy within its
/// budget. Never swallowed silently.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

}  // namespace minkval
