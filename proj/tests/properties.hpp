#pragma once

// Randomized property checks shared by the doctest suite and the acceptance
// binary. Every check draws `cases` inputs from a seeded generator and
// compares the library against an oracle written here from the definitions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psys/dsl.hpp"
#include "psys/engine.hpp"
#include "psys/relief/euler.hpp"
#include "psys/relief/quantized.hpp"
#include "psys/relief/schedule.hpp"
#include "psys/trace.hpp"
#include "support.hpp"

namespace psys::testing {

struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

// ---------------------------------------------------------------------------
// Random membrane systems

struct RandomSystemShape {
  int max_membranes = 3;
  int max_rules = 5;
  int max_objects = 8;
};

inline Polarization random_polarization(std::mt19937_64& rng, int neutral_weight = 2) {
  int v = std::uniform_int_distribution<int>(0, neutral_weight + 1)(rng);
  if (v <= neutral_weight - 1) return Polarization::neutral;
  return v == neutral_weight ? Polarization::positive : Polarization::negative;
}

inline Multiset random_multiset(std::mt19937_64& rng, const std::vector<SymbolId>& syms, int min_distinct,
                                int max_distinct, int max_count) {
  Multiset m;
  int distinct = std::uniform_int_distribution<int>(min_distinct, max_distinct)(rng);
  std::vector<SymbolId> pool = syms;
  std::shuffle(pool.begin(), pool.end(), rng);
  for (int i = 0; i < distinct && i < static_cast<int>(pool.size()); ++i) {
    m.add(pool[static_cast<std::size_t>(i)], static_cast<Count>(std::uniform_int_distribution<int>(1, max_count)(rng)));
  }
  return m;
}

inline PSystemDef random_system(std::mt19937_64& rng, const RandomSystemShape& shape = {}) {
  PSystemDef def;
  std::vector<SymbolId> syms;
  for (const char* s : {"a", "b", "c"}) syms.push_back(def.alphabet.intern(s));

  def.add_skin("1");
  int membranes = std::uniform_int_distribution<int>(1, shape.max_membranes)(rng);
  for (int i = 2; i <= membranes; ++i) {
    MembraneIndex parent = std::uniform_int_distribution<MembraneIndex>(0, def.membranes.size() - 1)(rng);
    def.add_membrane(std::to_string(i), parent);
  }
  def.initial.assign(def.membranes.size(), Multiset{});
  int objects = std::uniform_int_distribution<int>(shape.max_objects / 2, shape.max_objects)(rng);
  for (int i = 0; i < objects; ++i) {
    MembraneIndex h = i < 3 ? 0 : std::uniform_int_distribution<MembraneIndex>(0, def.membranes.size() - 1)(rng);
    def.initial[h].add(syms[std::uniform_int_distribution<std::size_t>(0, syms.size() - 1)(rng)], 1);
  }

  int rules = std::uniform_int_distribution<int>(1, shape.max_rules)(rng);
  for (int i = 1; i <= rules; ++i) {
    Rule r;
    r.id = "r" + std::to_string(i);
    r.membrane = std::uniform_int_distribution<MembraneIndex>(0, def.membranes.size() - 1)(rng);
    if (i == 1) r.membrane = 0;
    int kind = std::uniform_int_distribution<int>(0, r.membrane == 0 ? 1 : 2)(rng);
    r.kind = static_cast<RuleKind>(kind);
    r.lhs = random_multiset(rng, syms, 1, 2, std::bernoulli_distribution(0.7)(rng) ? 1 : 2);
    r.inside = random_multiset(rng, syms, 0, 2, 2);
    if (r.kind != RuleKind::evolution) r.outside = random_multiset(rng, syms, 0, 1, 2);
    r.alpha = random_polarization(rng, 4);
    r.beta = r.kind == RuleKind::evolution ? r.alpha : random_polarization(rng, 1);
    def.add_rule(std::move(r));
  }
  for (RuleIndex i = 0; i < def.rules.size(); ++i) {
    for (RuleIndex j = i + 1; j < def.rules.size(); ++j) {
      if (def.rules[i].membrane == def.rules[j].membrane && std::bernoulli_distribution(0.35)(rng)) {
        def.priorities.push_back({i, j});
      }
    }
  }
  return def;
}

inline Configuration random_configuration(std::mt19937_64& rng, const PSystemDef& def) {
  Configuration c = Configuration::initial(def);
  for (auto& p : c.polarizations) p = random_polarization(rng, 4);
  return c;
}

// ---------------------------------------------------------------------------
// Oracles for one step, written from the rule semantics

inline bool oracle_compatible(const PSystemDef& def, CompatibilityMode mode, RuleIndex a, RuleIndex b) {
  const Rule& x = def.rules[a];
  const Rule& y = def.rules[b];
  if (x.kind == RuleKind::evolution || y.kind == RuleKind::evolution) return true;
  if (x.membrane != y.membrane || x.alpha != y.alpha) return true;
  if (mode == CompatibilityMode::relaxed && (x.beta == x.alpha || y.beta == y.alpha)) return true;
  return x.beta == y.beta;
}

inline MembraneIndex oracle_source(const PSystemDef& def, const Rule& r) {
  return r.kind == RuleKind::send_in ? *def.membranes[r.membrane].parent : r.membrane;
}

/// Contents left in every region after the plan's consumption, or nothing
/// when the plan consumes more than is there.
inline std::optional<std::vector<Multiset>> oracle_residual(const PSystemDef& def, const Configuration& c,
                                                            const FiringPlan& plan) {
  std::vector<Multiset> left = c.contents;
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    Count k = plan.counts[r];
    if (k == 0) continue;
    Multiset need;
    need.add(def.rules[r].lhs, k);
    MembraneIndex src = oracle_source(def, def.rules[r]);
    if (!left[src].covers(need)) return std::nullopt;
    left[src].subtract(need);
  }
  return left;
}

inline bool guard_ok(const PSystemDef& def, const Configuration& c, RuleIndex r) {
  return c.polarizations[def.rules[r].membrane] == def.rules[r].alpha;
}

inline bool could_fire(const PSystemDef& def, const Configuration& c, const std::vector<Multiset>& residual,
                       RuleIndex r) {
  return guard_ok(def, c, r) && residual[oracle_source(def, def.rules[r])].covers(def.rules[r].lhs);
}

/// Empty string when the plan is feasible, guarded, compatible, respects weak
/// priority and is maximal; otherwise the first violated condition.
inline std::string plan_violation(const PSystemDef& def, CompatibilityMode mode, const Configuration& c,
                                  const FiringPlan& plan) {
  auto residual = oracle_residual(def, c, plan);
  if (!residual) return "plan consumes more than available";
  std::vector<RuleIndex> fired;
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    if (plan.counts[r] == 0) continue;
    if (!guard_ok(def, c, r)) return "rule " + def.rules[r].id + " fired against its polarization guard";
    fired.push_back(r);
  }
  for (RuleIndex a : fired) {
    for (RuleIndex b : fired) {
      if (!oracle_compatible(def, mode, a, b)) {
        return "incompatible rules " + def.rules[a].id + " and " + def.rules[b].id;
      }
    }
  }
  // A lower rule may only use objects its higher-priority rules could not:
  // handing back everything r took must still leave each predecessor unable
  // to fire. This also covers the plain residual condition.
  auto blocked = [&](RuleIndex r) {
    std::vector<Multiset> given_back = *residual;
    given_back[oracle_source(def, def.rules[r])].add(def.rules[r].lhs, plan.counts[r]);
    for (const auto& p : def.priorities) {
      if (p.lower == r && could_fire(def, c, given_back, p.higher)) return true;
    }
    return false;
  };
  for (RuleIndex r : fired) {
    if (blocked(r)) return "rule " + def.rules[r].id + " fired while a higher-priority rule could still fire";
  }
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    if (!could_fire(def, c, *residual, r) || blocked(r)) continue;
    bool fits = std::all_of(fired.begin(), fired.end(),
                            [&](RuleIndex f) { return oracle_compatible(def, mode, r, f); });
    if (fits) return "not maximal: rule " + def.rules[r].id + " could fire once more";
  }
  return "";
}

/// Applies the plan from the rule semantics.
inline Configuration oracle_apply(const PSystemDef& def, const Configuration& c, const FiringPlan& plan) {
  Configuration next = c;
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    Count k = plan.counts[r];
    if (k == 0) continue;
    const Rule& rule = def.rules[r];
    next.contents[oracle_source(def, rule)].subtract(rule.lhs, k);
  }
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    Count k = plan.counts[r];
    if (k == 0) continue;
    const Rule& rule = def.rules[r];
    next.contents[rule.membrane].add(rule.inside, k);
    if (rule.kind != RuleKind::evolution) {
      auto parent = def.membranes[rule.membrane].parent;
      (parent ? next.contents[*parent] : next.environment).add(rule.outside, k);
      if (rule.beta != rule.alpha) next.polarizations[rule.membrane] = rule.beta;
    }
  }
  ++next.step_index;
  return next;
}

/// Every plan within the per-rule copy bounds that plan_violation accepts.
inline std::vector<FiringPlan> all_valid_plans(const PSystemDef& def, CompatibilityMode mode, const Configuration& c) {
  std::vector<Count> bound(def.rules.size(), 0);
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    if (guard_ok(def, c, r)) bound[r] = c.contents[oracle_source(def, def.rules[r])].max_copies(def.rules[r].lhs);
  }
  std::vector<FiringPlan> out;
  FiringPlan plan{std::vector<Count>(def.rules.size(), 0)};
  std::function<void(RuleIndex)> rec = [&](RuleIndex r) {
    if (r == def.rules.size()) {
      if (plan_violation(def, mode, c, plan).empty()) out.push_back(plan);
      return;
    }
    for (Count k = 0; k <= bound[r]; ++k) {
      plan.counts[r] = k;
      rec(r + 1);
    }
    plan.counts[r] = 0;
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Engine properties

inline PropertyResult check_step_properties(std::uint64_t seed, int cases, CompatibilityMode mode) {
  PropertyResult res;
  res.name = mode == CompatibilityMode::relaxed ? "step invariants (relaxed)" : "step invariants (strict)";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    PSystemDef def = random_system(rng);
    Engine engine(def, mode);
    Configuration c = random_configuration(rng, def);
    for (SelectionPolicy policy : {SelectionPolicy::deterministic, SelectionPolicy::seeded_random}) {
      FiringPlan plan = engine.select_firing(c, policy, rng());
      std::string v = plan_violation(def, mode, c, plan);
      if (!v.empty()) {
        res.fail("case " + std::to_string(i) + ": " + v + "\n" + dsl::serialize(def));
        continue;
      }
      Configuration next = engine.apply_step(c, plan);
      if (!(next == oracle_apply(def, c, plan))) res.fail("case " + std::to_string(i) + ": step result differs");
    }
    ++res.cases;
  }
  return res;
}

/// The selected plan is one of the plans found by exhaustive enumeration.
inline PropertyResult check_plan_oracle(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "selection within brute-force plan set";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    PSystemDef def = random_system(rng);
    CompatibilityMode mode = i % 2 ? CompatibilityMode::strict : CompatibilityMode::relaxed;
    Engine engine(def, mode);
    Configuration c = random_configuration(rng, def);
    auto plans = all_valid_plans(def, mode, c);
    if (plans.empty()) {
      res.fail("case " + std::to_string(i) + ": no valid plan exists\n" + dsl::serialize(def));
      continue;
    }
    for (int trial = 0; trial < 4; ++trial) {
      SelectionPolicy policy = trial == 0 ? SelectionPolicy::deterministic : SelectionPolicy::seeded_random;
      FiringPlan plan = engine.select_firing(c, policy, rng());
      if (std::find(plans.begin(), plans.end(), plan) == plans.end()) {
        res.fail("case " + std::to_string(i) + ": plan outside the enumerated set\n" + dsl::serialize(def));
      }
    }
    ++res.cases;
  }
  return res;
}

inline std::string traced_run(const PSystemDef& def, SelectionPolicy policy, std::uint64_t seed) {
  std::ostringstream out;
  RunOptions o;
  o.policy = policy;
  o.seed = seed;
  o.max_steps = 50;
  o.observer = trace_observer(out, def);
  RunReport r = Engine(def).run(o);
  out << "halted=" << r.halted << " steps=" << r.steps << " digest=" << digest(r.final) << '\n';
  return out.str();
}

inline PropertyResult check_determinism(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "determinism under a fixed seed";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    PSystemDef def = random_system(rng);
    std::uint64_t run_seed = rng();
    for (SelectionPolicy policy : {SelectionPolicy::deterministic, SelectionPolicy::seeded_random}) {
      if (traced_run(def, policy, run_seed) != traced_run(def, policy, run_seed)) {
        res.fail("case " + std::to_string(i) + ": traces differ\n" + dsl::serialize(def));
      }
    }
    ++res.cases;
  }
  return res;
}

// ---------------------------------------------------------------------------
// DSL properties

inline PropertyResult check_dsl_round_trip(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "DSL round trip";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    PSystemDef def = random_system(rng);
    if (std::bernoulli_distribution(0.3)(rng)) def.output = def.membranes.size() - 1;
    const std::string text = dsl::serialize(def);
    auto parsed = dsl::parse({text});
    if (!std::holds_alternative<PSystemDef>(parsed)) {
      const auto& d = std::get<std::vector<dsl::ParseDiagnostic>>(parsed).front();
      res.fail("case " + std::to_string(i) + ": " + dsl::format_diagnostic(d, "<generated>") + "\n" + text);
      continue;
    }
    const PSystemDef& back = std::get<PSystemDef>(parsed);
    if (!structurally_equal(def, back)) res.fail("case " + std::to_string(i) + ": structure changed\n" + text);
    if (dsl::serialize(back) != text) res.fail("case " + std::to_string(i) + ": canonical text not a fixed point");
    ++res.cases;
  }
  return res;
}

/// Mutated sources either parse to a valid definition or produce positioned
/// diagnostics; the parser never throws.
inline PropertyResult check_dsl_fuzz(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "DSL parser on mutated input";
  std::mt19937_64 rng(seed);
  const std::string pieces = "[]{}()'^@;:,>-+0 \n/abcdrule";
  for (int i = 0; i < cases; ++i) {
    std::string text = dsl::serialize(random_system(rng));
    int edits = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      std::size_t at = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
      char ch = pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: text[at] = ch; break;
        case 1: text.insert(text.begin() + static_cast<std::ptrdiff_t>(at), ch); break;
        default: text.erase(at, 1); break;
      }
    }
    try {
      auto parsed = dsl::parse({text});
      if (auto* def = std::get_if<PSystemDef>(&parsed)) {
        if (!def->problems().empty()) res.fail("case " + std::to_string(i) + ": accepted an invalid definition");
      } else {
        const auto& diags = std::get<std::vector<dsl::ParseDiagnostic>>(parsed);
        if (diags.empty()) res.fail("case " + std::to_string(i) + ": rejected without a diagnostic");
        for (const auto& d : diags) {
          if (d.line < 1 || d.column < 1) res.fail("case " + std::to_string(i) + ": unpositioned diagnostic");
        }
      }
    } catch (const std::exception& e) {
      res.fail("case " + std::to_string(i) + ": parser threw: " + e.what() + "\n" + text);
    }
    ++res.cases;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Solver properties

inline relief::SolverState random_state(std::mt19937_64& rng, const relief::ReliefInstance& inst) {
  std::uniform_real_distribution<double> u(0, 3);
  relief::SolverState st = relief::initial_state(inst);
  for (double& v : st.q.data) v = std::bernoulli_distribution(0.2)(rng) ? 0.0 : u(rng);
  for (auto* vec : {&st.lam, &st.lam1, &st.lam2}) {
    for (double& v : *vec) v = std::bernoulli_distribution(0.5)(rng) ? 0.0 : u(rng);
  }
  st.t = std::uniform_int_distribution<std::uint64_t>(0, 20000)(rng);
  return st;
}

inline bool non_negative(const relief::SolverState& st) {
  auto ok = [](double v) { return v >= 0 && std::isfinite(v); };
  return std::all_of(st.q.data.begin(), st.q.data.end(), ok) && std::all_of(st.lam.begin(), st.lam.end(), ok) &&
         std::all_of(st.lam1.begin(), st.lam1.end(), ok) && std::all_of(st.lam2.begin(), st.lam2.end(), ok);
}

inline PropertyResult check_projection(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "projection keeps every component non-negative";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    relief::ReliefInstance inst = random_instance(rng, 3, 3);
    inst.vis_k.assign(inst.n, 1.5);
    relief::SolverState st = random_state(rng, inst);
    for (int t = 0; t < 20; ++t) {
      for (auto variant : {relief::Variant::simplified, relief::Variant::full}) {
        if (!non_negative(relief::euler_step(st, inst, variant))) {
          res.fail("case " + std::to_string(i) + ": negative component after a step");
        }
      }
      st = relief::euler_step(st, inst, relief::Variant::simplified);
    }
    ++res.cases;
  }
  return res;
}

/// Relabelling NGOs and locations commutes with one step: every (k, l)
/// update reads only the time-t state.
inline PropertyResult check_jacobi_purity(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "step commutes with index permutations";
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cases; ++i) {
    relief::ReliefInstance inst = random_instance(rng, 3, 3);
    inst.vis_k.clear();
    for (std::size_t l = 0; l < inst.n; ++l) inst.vis_k.push_back(0.5 + static_cast<double>(l));
    std::vector<std::size_t> pk(inst.m), pl(inst.n);
    std::iota(pk.begin(), pk.end(), 0);
    std::iota(pl.begin(), pl.end(), 0);
    std::shuffle(pk.begin(), pk.end(), rng);
    std::shuffle(pl.begin(), pl.end(), rng);

    auto permute_instance = [&](const relief::ReliefInstance& a) {
      relief::ReliefInstance b = a;
      for (std::size_t k = 0; k < a.m; ++k) {
        b.s[k] = a.s[pk[k]];
        b.omega[k] = a.omega[pk[k]];
        b.beta[k] = a.beta[pk[k]];
        for (std::size_t l = 0; l < a.n; ++l) {
          b.gamma(k, l) = a.gamma(pk[k], pl[l]);
          b.cost_a(k, l) = a.cost_a(pk[k], pl[l]);
          b.cost_b(k, l) = a.cost_b(pk[k], pl[l]);
        }
      }
      for (std::size_t l = 0; l < a.n; ++l) {
        b.d_lo[l] = a.d_lo[pl[l]];
        b.d_hi[l] = a.d_hi[pl[l]];
        b.vis_k[l] = a.vis_k[pl[l]];
      }
      return b;
    };
    auto permute_state = [&](const relief::SolverState& a) {
      relief::SolverState b = a;
      for (std::size_t k = 0; k < inst.m; ++k) {
        b.lam[k] = a.lam[pk[k]];
        for (std::size_t l = 0; l < inst.n; ++l) b.q(k, l) = a.q(pk[k], pl[l]);
      }
      for (std::size_t l = 0; l < inst.n; ++l) {
        b.lam1[l] = a.lam1[pl[l]];
        b.lam2[l] = a.lam2[pl[l]];
      }
      return b;
    };
    auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (std::abs(a[j] - b[j]) > 1e-12 * std::max(1.0, std::abs(a[j]))) return false;
      }
      return true;
    };

    relief::SolverState st = random_state(rng, inst);
    for (auto variant : {relief::Variant::simplified, relief::Variant::full}) {
      relief::SolverState direct = permute_state(relief::euler_step(st, inst, variant));
      relief::SolverState relabelled = relief::euler_step(permute_state(st), permute_instance(inst), variant);
      if (!close(direct.q.data, relabelled.q.data) || !close(direct.lam, relabelled.lam) ||
          !close(direct.lam1, relabelled.lam1) || !close(direct.lam2, relabelled.lam2)) {
        res.fail("case " + std::to_string(i) + ": permuted step differs");
      }
    }

    relief::QuantizedConstants c = relief::quantize(inst, 3);
    relief::QuantizedConstants cp = relief::quantize(permute_instance(inst), 3);
    relief::QuantizedState qs = relief::initial_quantized_state(c, inst.m, inst.n);
    relief::QuantizedState qp = relief::initial_quantized_state(cp, inst.m, inst.n);
    for (int t = 0; t < 30; ++t) {
      qs = relief::quantized_euler_step(qs, c, 0);
      qp = relief::quantized_euler_step(qp, cp, 0);
    }
    for (std::size_t k = 0; k < inst.m; ++k) {
      for (std::size_t l = 0; l < inst.n; ++l) {
        if (qp.q(k, l) != qs.q(pk[k], pl[l])) res.fail("case " + std::to_string(i) + ": permuted counts differ");
      }
    }
    ++res.cases;
  }
  return res;
}

/// Largest a_0 * 2 a^2 / beta over the instance. Below 1 the q update is a
/// contraction toward its target, and rounding errors cannot grow.
inline double step_gain(const relief::ReliefInstance& inst) {
  double g = 0;
  for (std::size_t k = 0; k < inst.m; ++k) {
    for (std::size_t l = 0; l < inst.n; ++l) {
      g = std::max(g, 0.1 * 2 * inst.cost_a(k, l) * inst.cost_a(k, l) / inst.beta[k]);
    }
  }
  return g;
}

/// |count / 10^p - float q| <= C t / 10^p over 200 iterations, C = 1, on
/// instances whose q update is contractive.
inline PropertyResult check_quantized_float_agreement(std::uint64_t seed, int cases) {
  PropertyResult res;
  res.name = "quantized and float iterations agree";
  constexpr double kC = 1.0;
  std::mt19937_64 rng(seed);
  while (res.cases < cases) {
    relief::ReliefInstance inst = random_instance(rng);
    if (step_gain(inst) > 1) continue;
    unsigned p = std::uniform_int_distribution<unsigned>(3, 6)(rng);
    const double scale = std::pow(10.0, p);
    std::vector<relief::QuantizedState> traj;
    relief::solve_quantized(inst, p, 200, 20, [&](const relief::QuantizedState& s) { traj.push_back(s); });
    relief::SolverState st = relief::initial_state(inst);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      for (std::size_t j = 0; j < st.q.data.size(); ++j) {
        double gap = std::abs(static_cast<double>(traj[t].q.data[j]) / scale - st.q.data[j]);
        if (gap > kC * static_cast<double>(std::max<std::size_t>(t, 1)) / scale) {
          res.fail("case " + std::to_string(res.cases) + ": gap " + std::to_string(gap * scale) + "/10^p at t=" +
                   std::to_string(t));
        }
      }
      st = relief::euler_step(st, inst, relief::Variant::simplified);
    }
    ++res.cases;
  }
  return res;
}

/// Converged float reports meet every constraint within 100 tol, and the
/// stationarity bracket g satisfies |g| <= 10 tol / a_final where q > 0 and
/// g <= 10 tol / a_final where q = 0.
inline PropertyResult check_converged_reports(std::uint64_t seed, int cases, std::uint64_t max_iter = 20000) {
  PropertyResult res;
  res.name = "converged reports are feasible and stationary";
  std::mt19937_64 rng(seed);
  const double tol = 1e-5;
  int attempts = 0;
  while (res.cases < cases && attempts < 20 * cases) {
    ++attempts;
    relief::ReliefInstance inst = random_instance(rng);
    relief::EquilibriumReport r = relief::solve(inst, relief::Variant::simplified, tol, max_iter);
    if (!r.converged) continue;
    if (r.feasibility.max_violation() > 100 * tol) {
      res.fail("case " + std::to_string(res.cases) + ": constraint violated by " +
               std::to_string(r.feasibility.max_violation()));
    }
    const double bound = 10 * tol / relief::step_size(r.state.t);
    for (std::size_t j = 0; j < r.stationarity.data.size(); ++j) {
      double g = r.stationarity.data[j];
      bool ok = r.state.q.data[j] > 0 ? std::abs(g) <= bound : g <= bound;
      if (!ok) res.fail("case " + std::to_string(res.cases) + ": stationarity residual " + std::to_string(g));
    }
    ++res.cases;
  }
  return res;
}

}  // namespace psys::testing
