#include "psys/relief/quantized.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "psys/relief/schedule.hpp"

namespace psys::relief {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Shortest round-trip decimal of x as an exact rational.
cpp_rational exact_decimal(double x) {
  if (!std::isfinite(x)) throw InstanceError("non-finite parameter");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string text(buf, end);
  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '-') {
    negative = true;
    ++i;
  }
  cpp_int digits = 0;
  int exponent = 0;
  bool after_point = false;
  for (; i < text.size() && text[i] != 'e'; ++i) {
    if (text[i] == '.') {
      after_point = true;
      continue;
    }
    digits = digits * 10 + (text[i] - '0');
    if (after_point) --exponent;
  }
  if (i < text.size()) exponent += std::stoi(text.substr(i + 1));
  cpp_int power = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(exponent)));
  cpp_rational value = exponent >= 0 ? cpp_rational(digits * power) : cpp_rational(digits, power);
  return negative ? -value : value;
}

cpp_int floor_of(const cpp_rational& r) {
  cpp_int num = numerator(r);
  cpp_int den = denominator(r);
  cpp_int q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

cpp_int ceil_of(const cpp_rational& r) { return -floor_of(-r); }

Count to_count(const cpp_int& v, const char* what) {
  if (v < 0) throw InstanceError(std::string(what) + " is negative");
  if (msb(v == 0 ? cpp_int(1) : v) >= 128) throw OverflowError(std::string(what) + " exceeds 128 bits");
  return parse_count(v.str());
}

Count sum_row(const CountGrid& g, std::size_t k) {
  Count s = 0;
  for (std::size_t l = 0; l < g.cols; ++l) s = checked_add(s, g(k, l));
  return s;
}

Count sum_col(const CountGrid& g, std::size_t l) {
  Count s = 0;
  for (std::size_t k = 0; k < g.rows; ++k) s = checked_add(s, g(k, l));
  return s;
}

// max(0, base + sign(pos - neg) * increment(|pos - neg|))
Count settle(Count base, Count pos, Count neg, unsigned w) {
  if (pos >= neg) return checked_add(base, scaled_increment(pos - neg, w));
  const Count down = scaled_increment(neg - pos, w);
  return down >= base ? 0 : base - down;
}

}  // namespace

Count encode_scalar(double x, unsigned p) {
  if (x < 0) throw std::invalid_argument("encode_scalar needs a non-negative value");
  return to_count(floor_of(exact_decimal(x) * cpp_rational(boost::multiprecision::pow(cpp_int(10), p))),
                  "encoded value");
}

QuantizedConstants quantize(const ReliefInstance& inst, unsigned p) {
  QuantizedConstants c;
  c.p = p;
  c.scale = pow10(p);
  const cpp_rational P(boost::multiprecision::pow(cpp_int(10), p));
  c.kappa0 = CountGrid(inst.m, inst.n);
  c.kappa1 = CountGrid(inst.m, inst.n);
  c.slope = CountGrid(inst.m, inst.n);
  for (std::size_t k = 0; k < inst.m; ++k) {
    const cpp_rational beta = exact_decimal(inst.beta[k]);
    const cpp_int d = floor_of(P * beta);
    const cpp_int h = ceil_of(P * beta / 2);
    if (d == 0 || h == 0) {
      int need = static_cast<int>(p);
      while (floor_of(cpp_rational(boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(need))) * beta) == 0) {
        ++need;
      }
      throw InstanceError("beta[" + std::to_string(k) + "] = " + std::to_string(inst.beta[k]) +
                          " gives floor(P*beta) = 0 at p = " + std::to_string(p) + "; use p >= " +
                          std::to_string(need));
    }
    c.divisor.push_back(to_count(d, "floor(P*beta)"));
    c.half.push_back(to_count(h, "ceil(P*beta/2)"));
    c.supply.push_back(to_count(floor_of(exact_decimal(inst.s[k]) * P), "floor(s*P)"));
    const cpp_rational omega = exact_decimal(inst.omega[k]);
    for (std::size_t l = 0; l < inst.n; ++l) {
      const cpp_rational a = exact_decimal(inst.cost_a(k, l));
      const cpp_rational b = exact_decimal(inst.cost_b(k, l));
      const cpp_rational g = exact_decimal(inst.gamma(k, l));
      c.kappa0(k, l) = to_count(floor_of(P * omega * g / beta), "kappa0");
      c.kappa1(k, l) = to_count(floor_of(2 * P * a * b / beta), "kappa1");
      c.slope(k, l) = to_count(floor_of(2 * P * a * a), "floor(2*P*a^2)");
    }
  }
  for (std::size_t l = 0; l < inst.n; ++l) {
    c.lower.push_back(to_count(floor_of(exact_decimal(inst.d_lo[l]) * P), "floor(d_lo*P)"));
    c.upper.push_back(to_count(floor_of(exact_decimal(inst.d_hi[l]) * P), "floor(d_hi*P)"));
  }
  return c;
}

QuantizedState initial_quantized_state(const QuantizedConstants& c, std::size_t m, std::size_t n) {
  QuantizedState st;
  st.q = CountGrid(m, n, c.scale);
  st.lam.assign(m, 0);
  st.lam1.assign(n, 0);
  st.lam2.assign(n, 0);
  return st;
}

Count scaled_increment(Count magnitude, unsigned w) {
  Count x = w >= 128 ? 0 : magnitude >> w;
  return x / 10 + (x % 10 >= 5 ? 1 : 0);
}

Count round_by_divisor(Count raw, Count d, Count half) { return raw / d + (raw % d >= half ? 1 : 0); }

QuantizedState quantized_euler_step(const QuantizedState& st, const QuantizedConstants& c, unsigned w) {
  const std::size_t m = st.q.rows;
  const std::size_t n = st.q.cols;
  QuantizedState next = st;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const Count pos = checked_add(c.kappa0(k, l), st.lam1[l]);
      Count neg = round_by_divisor(checked_mul(st.q(k, l), c.slope(k, l)), c.divisor[k], c.half[k]);
      neg = checked_add(neg, c.kappa1(k, l));
      neg = checked_add(neg, st.lam[k]);
      neg = checked_add(neg, st.lam2[l]);
      next.q(k, l) = settle(st.q(k, l), pos, neg, w);
    }
  }
  for (std::size_t k = 0; k < m; ++k) next.lam[k] = settle(st.lam[k], sum_row(st.q, k), c.supply[k], w);
  for (std::size_t l = 0; l < n; ++l) {
    const Count col = sum_col(st.q, l);
    next.lam1[l] = settle(st.lam1[l], c.lower[l], col, w);
    next.lam2[l] = settle(st.lam2[l], col, c.upper[l], w);
  }
  next.t = st.t + 1;
  return next;
}

QuantizedReport solve_quantized(const ReliefInstance& inst, unsigned p, std::uint64_t max_iter, unsigned levels,
                                const QuantizedObserver& observer) {
  const QuantizedConstants c = quantize(inst, p);
  QuantizedReport report;
  QuantizedState st = initial_quantized_state(c, inst.m, inst.n);
  while (report.iterations < max_iter) {
    if (observer) observer(st);
    QuantizedState next = quantized_euler_step(st, c, counter_halvings(st.t, levels));
    ++report.iterations;
    const bool same = next.q == st.q;
    st = std::move(next);
    if (same) {
      report.converged = true;
      break;
    }
  }
  report.state = std::move(st);
  return report;
}

Matrix decode(const CountGrid& q, unsigned p) {
  Matrix out(q.rows, q.cols);
  const Count scale = pow10(p);
  for (std::size_t i = 0; i < q.data.size(); ++i) {
    const Count whole = q.data[i] / scale;
    const Count frac = q.data[i] % scale;
    out.data[i] = static_cast<double>(whole) + static_cast<double>(frac) / static_cast<double>(scale);
  }
  return out;
}

}  // namespace psys::relief
