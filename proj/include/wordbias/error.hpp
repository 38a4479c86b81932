#pragma once

#include <stdexcept>
#include <string>

namespace wordbias {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cosine was requested for a vector with zero norm.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

/// The WEAT denominator vanished: all target associations are equal.
class DegenerateWeatError : public Error {
 public:
  using Error::Error;
};

}  // namespace wordbias
