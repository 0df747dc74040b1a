#pragma once

#include <cstdint>
#include <vector>

#include "psys/relief/instance.hpp"

namespace psys::relief {

enum class Variant { full, simplified };

struct SolverState {
  Matrix q;
  Vector lam;
  Vector lam1;
  Vector lam2;
  std::uint64_t t = 0;
};

/// q = 1 everywhere, multipliers 0.
SolverState initial_state(const ReliefInstance& inst);

/// Below this column sum the visibility derivative is evaluated at the floor
/// instead, i.e. capped at k_l / 2 * 1000.
inline constexpr double kVisibilityFloor = 1e-6;

/// (k_l / 2) / sqrt(sum_i q_il). `capped` is set when the floor was used.
double visibility_term(const ReliefInstance& inst, const Matrix& q, std::size_t k, std::size_t l,
                       bool* capped = nullptr);

/// One projected Euler step computed entirely from the time-t state.
SolverState euler_step(const SolverState& state, const ReliefInstance& inst, Variant variant,
                       bool* capped = nullptr);

double objective(const ReliefInstance& inst, const Matrix& q, Variant variant);

/// g_kl: the bracket of the q update, evaluated at the given point.
Matrix stationarity_residual(const ReliefInstance& inst, const SolverState& state, Variant variant);

struct FeasibilityResiduals {
  Vector supply;  // sum_l q_kl - s_k      (<= 0 when satisfied)
  Vector lower;   // d_lo_l - sum_k q_kl   (<= 0)
  Vector upper;   // sum_k q_kl - d_hi_l   (<= 0)

  double max_violation() const;
};

FeasibilityResiduals feasibility_residuals(const ReliefInstance& inst, const Matrix& q);

struct EquilibriumReport {
  SolverState state;  // state.q is q*
  std::uint64_t iterations = 0;
  bool converged = false;
  bool visibility_capped = false;
  FeasibilityResiduals feasibility;
  Matrix stationarity;
};

/// What the stopping test measures between consecutive iterates.
///
/// q_only stops once max |q^{t+1} - q^t| < tol, like the membrane system's
/// comparison stage. It can stop while q sits on the projection boundary and a
/// multiplier is still climbing, or right after the step size halves, so such
/// a report need not be feasible.
///
/// residual divides the max change over q and all multipliers by a_t. That is
/// the projected residual of every update, so a converged report violates no
/// constraint by more than tol and has |g_kl| < tol wherever q_kl > 0.
enum class StopRule { q_only, residual };

/// Iterates until the max-norm change selected by `stop` is below tol, or
/// max_iter steps.
EquilibriumReport solve(const ReliefInstance& inst, Variant variant, double tol, std::uint64_t max_iter,
                        StopRule stop = StopRule::residual);

}  // namespace psys::relief
