#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "psys/count.hpp"
#include "psys/relief/instance.hpp"

namespace psys::relief {

using CountGrid = Grid<Count>;
using CountVector = std::vector<Count>;

/// Integer constants of the membrane encoding at P = 10^p. Each is computed
/// exactly from the shortest decimal that round-trips the double input, so
/// 0.1 contributes exactly 1/10.
struct QuantizedConstants {
  unsigned p = 0;
  Count scale = 0;     // P
  CountGrid kappa0;    // floor(P w_k g_kl / b_k)
  CountGrid kappa1;    // floor(2 P a_kl b_kl / b_k)
  CountGrid slope;     // floor(2 P a_kl^2)
  CountVector divisor; // floor(P b_k)
  CountVector half;    // ceil(P b_k / 2)
  CountVector supply;  // floor(s_k P)
  CountVector lower;   // floor(d_lo_l P)
  CountVector upper;   // floor(d_hi_l P)
};

/// Throws InstanceError when divisor or half would be zero, naming the
/// smallest p that avoids it.
QuantizedConstants quantize(const ReliefInstance& inst, unsigned p);

/// floor(x * 10^p) computed exactly from x's shortest decimal form.
Count encode_scalar(double x, unsigned p);

struct QuantizedState {
  CountGrid q;
  CountVector lam;
  CountVector lam1;
  CountVector lam2;
  std::uint64_t t = 0;
};

QuantizedState initial_quantized_state(const QuantizedConstants& c, std::size_t m, std::size_t n);

/// floor-halve `magnitude` w times, then divide by 10 rounding half up.
Count scaled_increment(Count magnitude, unsigned w);

/// floor(raw / d) + [raw mod d >= half].
Count round_by_divisor(Count raw, Count d, Count half);

/// One iteration with w halvings, all updates from the time-t counts.
QuantizedState quantized_euler_step(const QuantizedState& state, const QuantizedConstants& c, unsigned w);

struct QuantizedReport {
  QuantizedState state;  // state.q is the output allocation
  std::uint64_t iterations = 0;
  bool converged = false;
};

using QuantizedObserver = std::function<void(const QuantizedState&)>;

/// Runs iterations with counter_halvings(t, levels) until two consecutive q
/// grids are equal or max_iter iterations. The observer sees the state at the
/// start of every iteration.
QuantizedReport solve_quantized(const ReliefInstance& inst, unsigned p, std::uint64_t max_iter, unsigned levels,
                                const QuantizedObserver& observer = {});

Matrix decode(const CountGrid& q, unsigned p);

}  // namespace psys::relief
