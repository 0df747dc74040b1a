#pragma once

#include <cstddef>
#include <stdexcept>

#include "psys/relief/instance.hpp"

namespace psys::harness {

struct ErrorStats {
  relief::Matrix per_cell;  // percent error; NaN where the reference is 0
  double average = 0;
  double median = 0;  // mean of the two middle values for an even count
  double max = 0;
  std::size_t cells = 0;     // cells that entered the statistics
  std::size_t excluded = 0;  // reference cells equal to zero

  std::size_t count_above(double percent) const;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |candidate - reference| / |reference| * 100 per cell. The reference is
/// the denominator, so compare(a, b) and compare(b, a) differ in value.
ErrorStats compare(const relief::Matrix& candidate, const relief::Matrix& reference);

}  // namespace psys::harness
