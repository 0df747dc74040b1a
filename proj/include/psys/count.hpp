#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psys {

/// Object multiplicity. Relief systems at p = 10 reach ~1e24 in intermediate
/// products, so counts are 128-bit and every arithmetic step is checked.
using Count = unsigned __int128;

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

inline Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("count overflow in addition");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("count overflow in multiplication");
  return r;
}

inline Count checked_sub(Count a, Count b) {
  if (b > a) throw std::logic_error("count underflow in subtraction");
  return a - b;
}

std::string to_string(Count c);

/// Parses a non-empty decimal digit string. Throws OverflowError past 2^128-1
/// and std::invalid_argument on any non-digit.
Count parse_count(std::string_view digits);

Count pow10(unsigned exponent);

}  // namespace psys
