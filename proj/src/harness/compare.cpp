#include "psys/harness/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace psys::harness {

std::size_t ErrorStats::count_above(double percent) const {
  std::size_t n = 0;
  for (double v : per_cell.data) {
    if (!std::isnan(v) && v > percent) ++n;
  }
  return n;
}

ErrorStats compare(const relief::Matrix& candidate, const relief::Matrix& reference) {
  if (candidate.rows != reference.rows || candidate.cols != reference.cols) {
    throw ShapeError("shape mismatch: candidate is " + std::to_string(candidate.rows) + "x" +
                     std::to_string(candidate.cols) + ", reference is " + std::to_string(reference.rows) + "x" +
                     std::to_string(reference.cols));
  }
  ErrorStats stats;
  stats.per_cell = relief::Matrix(reference.rows, reference.cols, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> errors;
  for (std::size_t i = 0; i < reference.data.size(); ++i) {
    const double ref = reference.data[i];
    if (ref == 0) {
      ++stats.excluded;
      continue;
    }
    const double e = std::abs(candidate.data[i] - ref) / std::abs(ref) * 100;
    stats.per_cell.data[i] = e;
    errors.push_back(e);
  }
  stats.cells = errors.size();
  if (errors.empty()) return stats;
  double sum = 0;
  for (double e : errors) sum += e;
  stats.average = sum / static_cast<double>(errors.size());
  std::sort(errors.begin(), errors.end());
  const std::size_t mid = errors.size() / 2;
  stats.median = errors.size() % 2 ? errors[mid] : (errors[mid - 1] + errors[mid]) / 2;
  stats.max = errors.back();
  return stats;
}

}  // namespace psys::harness
