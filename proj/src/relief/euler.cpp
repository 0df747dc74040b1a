#include "psys/relief/euler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psys/relief/schedule.hpp"

namespace psys::relief {

namespace {

double column_sum(const Matrix& q, std::size_t l) {
  double sum = 0;
  for (std::size_t k = 0; k < q.rows; ++k) sum += q(k, l);
  return sum;
}

double row_sum(const Matrix& q, std::size_t k) {
  double sum = 0;
  for (std::size_t l = 0; l < q.cols; ++l) sum += q(k, l);
  return sum;
}

double bracket(const ReliefInstance& inst, const SolverState& st, std::size_t k, std::size_t l, Variant variant,
               bool* capped) {
  const double a = inst.cost_a(k, l);
  const double b = inst.cost_b(k, l);
  double g = inst.omega[k] * inst.gamma(k, l) / inst.beta[k] -
             (2 * a * a * st.q(k, l) + 2 * a * b) / inst.beta[k] - st.lam[k] + st.lam1[l] - st.lam2[l];
  if (variant == Variant::full) g += visibility_term(inst, st.q, k, l, capped);
  return g;
}

void require_visibility(const ReliefInstance& inst, Variant variant) {
  if (variant == Variant::full && inst.vis_k.size() != inst.n) {
    throw std::invalid_argument("the full variant needs vis_k for every location");
  }
}

}  // namespace

SolverState initial_state(const ReliefInstance& inst) {
  SolverState st;
  st.q = Matrix(inst.m, inst.n, 1.0);
  st.lam.assign(inst.m, 0.0);
  st.lam1.assign(inst.n, 0.0);
  st.lam2.assign(inst.n, 0.0);
  return st;
}

double visibility_term(const ReliefInstance& inst, const Matrix& q, std::size_t k, std::size_t l, bool* capped) {
  (void)k;  // the derivative does not depend on which NGO moves
  double total = column_sum(q, l);
  if (total < kVisibilityFloor) {
    if (capped) *capped = true;
    total = kVisibilityFloor;
  }
  return inst.vis_k.at(l) / 2 / std::sqrt(total);
}

SolverState euler_step(const SolverState& st, const ReliefInstance& inst, Variant variant, bool* capped) {
  require_visibility(inst, variant);
  const double a_t = step_size(st.t);
  SolverState next = st;
  for (std::size_t k = 0; k < inst.m; ++k) {
    for (std::size_t l = 0; l < inst.n; ++l) {
      next.q(k, l) = std::max(0.0, st.q(k, l) + a_t * bracket(inst, st, k, l, variant, capped));
    }
  }
  for (std::size_t k = 0; k < inst.m; ++k) {
    next.lam[k] = std::max(0.0, st.lam[k] + a_t * (row_sum(st.q, k) - inst.s[k]));
  }
  for (std::size_t l = 0; l < inst.n; ++l) {
    const double col = column_sum(st.q, l);
    next.lam1[l] = std::max(0.0, st.lam1[l] + a_t * (inst.d_lo[l] - col));
    next.lam2[l] = std::max(0.0, st.lam2[l] + a_t * (col - inst.d_hi[l]));
  }
  next.t = st.t + 1;
  return next;
}

double objective(const ReliefInstance& inst, const Matrix& q, Variant variant) {
  require_visibility(inst, variant);
  double value = 0;
  for (std::size_t k = 0; k < inst.m; ++k) {
    for (std::size_t l = 0; l < inst.n; ++l) {
      const double cost = inst.cost_a(k, l) * q(k, l) + inst.cost_b(k, l);
      value += (cost * cost - inst.omega[k] * inst.gamma(k, l) * q(k, l)) / inst.beta[k];
    }
  }
  if (variant == Variant::full) {
    for (std::size_t l = 0; l < inst.n; ++l) value -= inst.vis_k[l] * std::sqrt(column_sum(q, l));
  }
  return value;
}

Matrix stationarity_residual(const ReliefInstance& inst, const SolverState& st, Variant variant) {
  require_visibility(inst, variant);
  Matrix g(inst.m, inst.n);
  for (std::size_t k = 0; k < inst.m; ++k) {
    for (std::size_t l = 0; l < inst.n; ++l) g(k, l) = bracket(inst, st, k, l, variant, nullptr);
  }
  return g;
}

double FeasibilityResiduals::max_violation() const {
  double worst = 0;
  for (const Vector* v : {&supply, &lower, &upper}) {
    for (double x : *v) worst = std::max(worst, x);
  }
  return worst;
}

FeasibilityResiduals feasibility_residuals(const ReliefInstance& inst, const Matrix& q) {
  FeasibilityResiduals r;
  for (std::size_t k = 0; k < inst.m; ++k) r.supply.push_back(row_sum(q, k) - inst.s[k]);
  for (std::size_t l = 0; l < inst.n; ++l) {
    const double col = column_sum(q, l);
    r.lower.push_back(inst.d_lo[l] - col);
    r.upper.push_back(col - inst.d_hi[l]);
  }
  return r;
}

namespace {

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double change = 0;
  for (std::size_t i = 0; i < a.size(); ++i) change = std::max(change, std::abs(a[i] - b[i]));
  return change;
}

}  // namespace

EquilibriumReport solve(const ReliefInstance& inst, Variant variant, double tol, std::uint64_t max_iter,
                        StopRule stop) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  require_visibility(inst, variant);
  EquilibriumReport report;
  SolverState st = initial_state(inst);
  bool capped = false;
  while (report.iterations < max_iter) {
    SolverState next = euler_step(st, inst, variant, &capped);
    ++report.iterations;
    double change = max_change(next.q.data, st.q.data);
    if (stop == StopRule::residual) {
      change = std::max({change, max_change(next.lam, st.lam), max_change(next.lam1, st.lam1),
                         max_change(next.lam2, st.lam2)}) /
               step_size(st.t);
    }
    st = std::move(next);
    if (change < tol) {
      report.converged = true;
      break;
    }
  }
  report.visibility_capped = capped;
  report.feasibility = feasibility_residuals(inst, st.q);
  report.stationarity = stationarity_residual(inst, st, variant);
  report.state = std::move(st);
  return report;
}

}  // namespace psys::relief
