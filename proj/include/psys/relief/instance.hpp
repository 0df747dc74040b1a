#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace psys::relief {

/// Dense row-major m x n array.
template <class T>
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t k, std::size_t l) { return data[k * cols + l]; }
  const T& operator()(std::size_t k, std::size_t l) const { return data[k * cols + l]; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

using Matrix = Grid<double>;
using Vector = std::vector<double>;

struct ReliefInstance {
  std::size_t m = 0;  // NGOs
  std::size_t n = 0;  // demand locations
  Vector s;
  Vector d_lo;
  Vector d_hi;
  Matrix gamma;
  Vector omega;
  Vector beta;
  Matrix cost_a;
  Matrix cost_b;
  Vector vis_k;  // empty when the instance carries no visibility data
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every violated invariant, in a stable order. Empty means the instance is
/// usable by all solvers (the full variant additionally needs vis_k).
std::vector<std::string> validate(const ReliefInstance& inst);

ReliefInstance instance_from_json(const std::string& text);
std::string instance_to_json(const ReliefInstance& inst);
ReliefInstance load_instance(const std::filesystem::path& path);

}  // namespace psys::relief
