#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fscap {

/// Exact rational in lowest terms with positive denominator.
using Rat = mpq_class;
using BigInt = mpz_class;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p/q" or an integer literal. The result is canonicalized.
Rat parse_rat(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is 1.
std::string to_string(const Rat& value);
std::string to_string(const BigInt& value);

/// 2^e for any integer e.
Rat pow2(long e);

/// Largest multiple of 2^-bits that is <= value.
Rat floor_dyadic(const Rat& value, unsigned bits);
/// Smallest multiple of 2^-bits that is >= value.
Rat ceil_dyadic(const Rat& value, unsigned bits);

bool is_dyadic(const Rat& value);

inline Rat abs(const Rat& value) { return value < 0 ? Rat(-value) : value; }

/// Probability in [0, 1].
inline bool is_probability(const Rat& value) { return value >= 0 && value <= 1; }

double to_double(const Rat& value);

/// Exact conversion of a finite double.
Rat from_double(double value);

}  // namespace fscap
