#include "psys/count.hpp"

#include <algorithm>

namespace psys {

std::string to_string(Count c) {
  if (c == 0) return "0";
  std::string out;
  while (c != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Count parse_count(std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("empty count");
  Count value = 0;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("non-digit in count");
    value = checked_add(checked_mul(value, 10), static_cast<Count>(ch - '0'));
  }
  return value;
}

Count pow10(unsigned exponent) {
  Count r = 1;
  for (unsigned i = 0; i < exponent; ++i) r = checked_mul(r, 10);
  return r;
}

}  // namespace psys
