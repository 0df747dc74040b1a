#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "psys/relief/instance.hpp"

namespace psys::testing {

inline relief::ReliefInstance derived_1x1() {
  relief::ReliefInstance inst;
  inst.m = 1;
  inst.n = 1;
  inst.s = {1000};
  inst.d_lo = {0};
  inst.d_hi = {1000};
  inst.gamma = relief::Matrix(1, 1, 1.0);
  inst.omega = {1};
  inst.beta = {1};
  inst.cost_a = relief::Matrix(1, 1, 1.0);
  inst.cost_b = relief::Matrix(1, 1, 0.0);
  return inst;
}

/// Parameters are multiples of 0.25 in [0.25, 4] so they are exact at p >= 2.
/// Supplies and demand bounds are kept in a range where the multipliers do
/// some work without driving the run past a few hundred iterations.
inline relief::ReliefInstance random_instance(std::mt19937_64& rng, std::size_t max_m = 2, std::size_t max_n = 2) {
  std::uniform_int_distribution<int> dim_m(1, static_cast<int>(max_m));
  std::uniform_int_distribution<int> dim_n(1, static_cast<int>(max_n));
  std::uniform_int_distribution<int> quarter(1, 16);
  auto param = [&] { return quarter(rng) * 0.25; };

  relief::ReliefInstance inst;
  inst.m = static_cast<std::size_t>(dim_m(rng));
  inst.n = static_cast<std::size_t>(dim_n(rng));
  inst.gamma = relief::Matrix(inst.m, inst.n);
  inst.cost_a = relief::Matrix(inst.m, inst.n);
  inst.cost_b = relief::Matrix(inst.m, inst.n);
  for (std::size_t k = 0; k < inst.m; ++k) {
    inst.s.push_back(param());
    inst.omega.push_back(param());
    inst.beta.push_back(param());
    for (std::size_t l = 0; l < inst.n; ++l) {
      inst.gamma(k, l) = param();
      inst.cost_a(k, l) = param();
      inst.cost_b(k, l) = param();
    }
  }
  double supply = 0;
  for (double v : inst.s) supply += v;
  for (std::size_t l = 0; l < inst.n; ++l) {
    double lo = std::min(param(), supply / static_cast<double>(inst.n));
    lo = std::floor(lo * 4) / 4;
    inst.d_lo.push_back(lo);
    inst.d_hi.push_back(lo + param());
  }
  return inst;
}

}  // namespace psys::testing
