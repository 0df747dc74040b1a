#include "psys/relief/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace psys::relief {

unsigned float_halvings(std::uint64_t t) {
  std::uint64_t start = 0;
  for (unsigned w = 0;; ++w) {
    const std::uint64_t length = w < 10 ? 1024 : (std::uint64_t{1} << w);
    if (t < start + length) return w;
    start += length;
  }
}

double step_size(std::uint64_t t) { return std::ldexp(0.1, -static_cast<int>(float_halvings(t))); }

unsigned counter_halvings(std::uint64_t t, unsigned levels) {
  unsigned w;
  if (t < 10240) {
    w = static_cast<unsigned>(t / 1024);
  } else {
    w = 10;
    while (w < 62 && t >= 8192 + (std::uint64_t{1} << (w + 2))) ++w;
  }
  return std::min(w, 10 + levels);
}

}  // namespace psys::relief
