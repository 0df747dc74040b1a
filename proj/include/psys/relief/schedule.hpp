#pragma once

#include <cstdint>

namespace psys::relief {

/// Number of halvings w at iteration t for the float solver: blocks of
/// length max(1024, 2^w) laid out from t = 0.
unsigned float_halvings(std::uint64_t t);

/// a_t = 0.1 / 2^w with w = float_halvings(t).
double step_size(std::uint64_t t);

/// Halvings seen by the membrane system's counter objects at iteration t.
/// count_0 objects accumulate one per iteration; ten blocks of 1024 give
/// w = 0..9, after which level j >= 1 needs 2^(10+j) iterations, so w = 10
/// starts at 10240 and w >= 11 starts at 8192 + 2^(w+1). `levels` is the
/// number of count_j levels the generated system carries; w never exceeds
/// 10 + levels.
unsigned counter_halvings(std::uint64_t t, unsigned levels);

}  // namespace psys::relief
