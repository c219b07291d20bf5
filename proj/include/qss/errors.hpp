#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qss {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A value had no multiplicative inverse modulo d.
class NotInvertible : public Error {
  public:
    NotInvertible(std::uint64_t value, std::uint64_t modulus, const std::string &context = {})
        : Error("value " + std::to_string(value) + " is not invertible mod " + std::to_string(modulus) +
                (context.empty() ? std::string{} : " (" + context + ")")),
          value_(value),
          modulus_(modulus) {
    }
    std::uint64_t value() const noexcept {
        return value_;
    }
    std::uint64_t modulus() const noexcept {
        return modulus_;
    }

  private:
    std::uint64_t value_;
    std::uint64_t modulus_;
};

class DuplicateAbscissa : public Error {
  public:
    using Error::Error;
};

class ZeroAbscissa : public Error {
  public:
    using Error::Error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class SizeCapExceeded : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
  public:
    using Error::Error;
};

/// Projection onto a branch whose probability is numerically zero.
class ZeroNormProjection : public Error {
  public:
    using Error::Error;
};

}  // namespace qss
