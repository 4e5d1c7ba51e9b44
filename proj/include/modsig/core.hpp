#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace modsig {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

// Base of every library error. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Asked for a value past the materialized prefix of a table.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Greedy self-expansion or growth window failed at `index`.
class SignatureError : public Error {
 public:
  SignatureError(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// A comparison or rounding could not be resolved inside the error bounds.
class IndeterminateError : public Error {
 public:
  IndeterminateError(const std::string& what, std::size_t index = 0) : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Root or closed-form certification failed at the precision cap.
class CertificationError : public Error {
 public:
  using Error::Error;
};

// Input violates the hypotheses of an analytic bound.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Number of significant bits of |x|; 0 for x = 0.
std::size_t bit_length(const BigInt& x);

BigInt parse_bigint(std::string_view text);

inline bool fits_int64(const BigInt& x) {
  return x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace modsig
