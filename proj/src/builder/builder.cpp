#include "psys/builder/builder.hpp"

#include <utility>

namespace psys::builder {

namespace {

constexpr Polarization Z = Polarization::neutral;
constexpr Polarization P = Polarization::positive;
constexpr Polarization N = Polarization::negative;

using Items = std::vector<std::pair<std::string, Count>>;

// Rule family name plus the prefix used for rule ids (they differ only
// for the second RS2.48).
struct Family {
  std::string name;
  std::string prefix;
  Family(const char* f) : name(f), prefix(f) {}
  Family(std::string f) : name(f), prefix(std::move(f)) {}
  Family(std::string f, std::string p) : name(std::move(f)), prefix(std::move(p)) {}
};

struct Reduce {
  MembraneIndex membrane;
  std::string tag;  // R0{k,l}, R1{k}, ...
};

class Generator {
 public:
  Generator(PSystemDef& def, std::map<std::string, std::vector<std::string>>& index) : def_(def), index_(index) {}

  Multiset ms(const Items& items) {
    Multiset m;
    for (const auto& [name, n] : items) {
      SymbolId id = def_.alphabet.intern(name);
      if (n != 0) m.add(id, n);
    }
    return m;
  }

  std::string evo(const Family& family, const std::string& suffix, MembraneIndex h, const Items& lhs,
                  const Items& rhs, Polarization pol) {
    return add(family, suffix, Rule{"", RuleKind::evolution, h, ms(lhs), ms(rhs), {}, pol, pol});
  }

  // [lhs]^alpha_h -> outside [inside]^beta_h
  std::string out(const Family& family, const std::string& suffix, MembraneIndex h, const Items& lhs,
                  Polarization alpha, const Items& outside, Polarization beta, const Items& inside = {}) {
    return add(family, suffix, Rule{"", RuleKind::send_out, h, ms(lhs), ms(inside), ms(outside), alpha, beta});
  }

  // lhs [ ]^alpha_h -> outside [inside]^beta_h
  std::string in(const Family& family, const std::string& suffix, MembraneIndex h, const Items& lhs,
                 Polarization alpha, const Items& inside, Polarization beta, const Items& outside = {}) {
    return add(family, suffix, Rule{"", RuleKind::send_in, h, ms(lhs), ms(inside), ms(outside), alpha, beta});
  }

  void prio(const std::string& higher, const std::string& lower) { def_.add_priority(higher, lower); }

 private:
  std::string add(const Family& family, const std::string& suffix, Rule rule) {
    rule.id = family.prefix + suffix;
    index_[family.name].push_back(rule.id);
    def_.add_rule(std::move(rule));
    return def_.rules.back().id;
  }

  PSystemDef& def_;
  std::map<std::string, std::vector<std::string>>& index_;
};

std::string kl(std::size_t k, std::size_t l) { return indexed("", k, l); }
std::string one(std::size_t i) { return indexed("", i); }

char pol_tag(Polarization p) {
  switch (p) {
    case Polarization::neutral: return '0';
    case Polarization::positive: return 'p';
    case Polarization::negative: return 'n';
  }
  return '?';
}

}  // namespace

std::string indexed(std::string_view base, std::size_t k) { return std::string(base) + "{" + std::to_string(k) + "}"; }

std::string indexed(std::string_view base, std::size_t k, std::size_t l) {
  return std::string(base) + "{" + std::to_string(k) + "," + std::to_string(l) + "}";
}

std::size_t expected_membrane_count(std::size_t m, std::size_t n) { return 4 + 2 * (m * n + m + 2 * n); }

SymbolId GeneratedSystem::symbol(const std::string& name) const {
  auto id = def.alphabet.find(name);
  if (!id) throw BuildError("generated system has no symbol '" + name + "'");
  return *id;
}

GeneratedSystem build(const BuildParams& params) {
  const relief::ReliefInstance& inst = params.instance;
  if (params.p < 1) throw BuildError("precision exponent p must be >= 1");
  if (auto problems = relief::validate(inst); !problems.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw BuildError(msg);
  }

  GeneratedSystem gen;
  gen.m = inst.m;
  gen.n = inst.n;
  gen.p = params.p;
  gen.counter_levels = params.counter_levels;
  try {
    gen.constants = relief::quantize(inst, params.p);
  } catch (const relief::InstanceError& e) {
    throw BuildError(e.what());
  }
  const auto& c = gen.constants;
  const std::size_t m = inst.m;
  const std::size_t n = inst.n;
  PSystemDef& def = gen.def;
  Generator g(def, gen.rule_index);

  // Membrane structure.
  const MembraneIndex skin = def.add_skin("1");
  const MembraneIndex INIT = def.add_membrane("INIT", skin);
  const MembraneIndex OUTPUT = def.add_membrane("OUTPUT", skin);
  def.output = OUTPUT;
  const MembraneIndex COMP = def.add_membrane("COMP", skin);
  relief::Grid<MembraneIndex> Q(m, n);
  std::vector<MembraneIndex> LAMB(m), LAMB1(n), LAMB2(n);
  std::vector<Reduce> reduces;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      Q(k - 1, l - 1) = def.add_membrane(indexed("Q", k, l), skin);
      reduces.push_back({def.add_membrane(indexed("REDUCE0", k, l), Q(k - 1, l - 1)), indexed("_R0", k, l)});
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    LAMB[k - 1] = def.add_membrane(indexed("LAMB", k), skin);
    reduces.push_back({def.add_membrane(indexed("REDUCE1", k), LAMB[k - 1]), indexed("_R1", k)});
  }
  for (std::size_t l = 1; l <= n; ++l) {
    LAMB1[l - 1] = def.add_membrane(indexed("LAMB1", l), skin);
    reduces.push_back({def.add_membrane(indexed("REDUCE2", l), LAMB1[l - 1]), indexed("_R2", l)});
  }
  for (std::size_t l = 1; l <= n; ++l) {
    LAMB2[l - 1] = def.add_membrane(indexed("LAMB2", l), skin);
    reduces.push_back({def.add_membrane(indexed("REDUCE3", l), LAMB2[l - 1]), indexed("_R3", l)});
  }

  // Initial multisets.
  def.initial[skin] = g.ms({{"y0", 1}});
  {
    Items xs;
    for (std::size_t k = 1; k <= m; ++k) {
      for (std::size_t l = 1; l <= n; ++l) xs.emplace_back(indexed("x", k, l), c.scale);
    }
    def.initial[INIT] = g.ms(xs);
  }

  auto q = [&](std::size_t k, std::size_t l) { return Q(k - 1, l - 1); };

  // Stage 1: initialization.
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.out("RS1.1", kl(k, l), INIT, {{indexed("x", k, l), 1}}, Z,
            {{indexed("x", k, l), 1}, {indexed("xt", k, l), 1}, {indexed("xl0", k, l), 1},
             {indexed("xl1", k, l), 1}, {indexed("xl2", k, l), 1}},
            Z);
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    Items rhs;
    for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("laq0", k, l), 1);
    rhs.emplace_back(indexed("la0", k), 1);
    g.out("RS1.2", one(k), INIT, {{indexed("la", k), 1}}, Z, rhs, Z);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    Items rhs;
    for (std::size_t k = 1; k <= m; ++k) rhs.emplace_back(indexed("laq1", k, l), 1);
    rhs.emplace_back(indexed("la1", l), 1);
    g.out("RS1.3", one(l), INIT, {{indexed("la1", l), 1}}, Z, rhs, Z);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    Items rhs;
    for (std::size_t k = 1; k <= m; ++k) rhs.emplace_back(indexed("laq2", k, l), 1);
    rhs.emplace_back(indexed("la2", l), 1);
    g.out("RS1.4", one(l), INIT, {{indexed("la2", l), 1}}, Z, rhs, Z);
  }
  {
    Items rhs;
    for (std::size_t k = 1; k <= m; ++k) {
      for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("y0", k, l), 1);
    }
    for (std::size_t k = 1; k <= m; ++k) rhs.emplace_back(indexed("yl", k), 1);
    for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("yl1", l), 1);
    for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("yl2", l), 1);
    g.evo("RS1.5", "", skin, {{"y0", 1}}, rhs, Z);
  }
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.in("RS1.6", kl(k, l), q(k, l), {{indexed("y0", k, l), 1}}, Z,
           {{"y0", 1}, {"p0", c.kappa0(k - 1, l - 1)}, {"ct0", c.kappa1(k - 1, l - 1)}}, N);
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    g.in("RS1.7", one(k), LAMB[k - 1], {{indexed("yl", k), 1}}, Z, {{"y0", 1}, {"n0", c.supply[k - 1]}}, N);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    g.in("RS1.8", one(l), LAMB1[l - 1], {{indexed("yl1", l), 1}}, Z, {{"y0", 1}, {"p0", c.lower[l - 1]}}, N);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    g.in("RS1.9", one(l), LAMB2[l - 1], {{indexed("yl2", l), 1}}, Z, {{"y0", 1}, {"n0", c.upper[l - 1]}}, N);
  }
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.in("RS1.10", kl(k, l), q(k, l), {{indexed("x", k, l), 1}}, N, {{"p", 1}, {"c0", 1}}, N);
      g.in("RS1.11", kl(k, l), q(k, l), {{indexed("laq0", k, l), 1}}, N, {{"n0", 1}}, N);
      g.in("RS1.12", kl(k, l), q(k, l), {{indexed("laq1", k, l), 1}}, N, {{"p0", 1}}, N);
      g.in("RS1.13", kl(k, l), q(k, l), {{indexed("laq2", k, l), 1}}, N, {{"n0", 1}}, N);
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.in("RS1.14", kl(k, l), LAMB[k - 1], {{indexed("xl0", k, l), 1}}, N, {{"p0", 1}}, N);
    }
    g.in("RS1.15", one(k), LAMB[k - 1], {{indexed("la0", k), 1}}, N, {{"p", 1}}, N);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    for (std::size_t k = 1; k <= m; ++k) {
      g.in("RS1.16", kl(k, l), LAMB1[l - 1], {{indexed("xl1", k, l), 1}}, N, {{"n0", 1}}, N);
    }
    g.in("RS1.17", one(l), LAMB1[l - 1], {{indexed("la1", l), 1}}, N, {{"p", 1}}, N);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    for (std::size_t k = 1; k <= m; ++k) {
      g.in("RS1.18", kl(k, l), LAMB2[l - 1], {{indexed("xl2", k, l), 1}}, N, {{"p0", 1}}, N);
    }
    g.in("RS1.19", one(l), LAMB2[l - 1], {{indexed("la2", l), 1}}, N, {{"p", 1}}, N);
  }

  // Stage 2: update of q.
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      const MembraneIndex h = q(k, l);
      const std::string s = kl(k, l);
      g.evo("RS2.1", s, h, {{"ct0", 1}}, {{"ct1", 1}}, N);
      g.evo("RS2.2", s, h, {{"y0", 1}}, {{"y1", 1}}, N);
      g.evo("RS2.3", s, h, {{"c0", 1}}, {{"c1", c.slope(k - 1, l - 1)}}, N);
      g.evo("RS2.4", s, h, {{"ct1", 1}}, {{"ct2", 1}}, N);
      g.evo("RS2.5", s, h, {{"y1", 1}}, {{"y2", 1}}, N);
      auto r6 = g.evo("RS2.6", s, h, {{"c1", c.divisor[k - 1]}}, {{"n0", 1}}, N);
      auto r7 = g.evo("RS2.7", s, h, {{"c1", c.half[k - 1]}}, {{"n0", 1}}, N);
      auto r8 = g.evo("RS2.8", s, h, {{"c1", 1}}, {}, N);
      g.prio(r6, r7);
      g.prio(r7, r8);
      g.evo("RS2.9", s, h, {{"ct2", 1}}, {{"n0", 1}}, N);
      g.evo("RS2.10", s, h, {{"y2", 1}}, {{"y3", 1}}, N);
    }
  }

  // Generic REDUCE rules, one copy per REDUCE membrane.
  for (const auto& r : reduces) {
    const MembraneIndex h = r.membrane;
    const std::string& s = r.tag;
    g.in("RS2.11", s, h, {{"y3", 1}}, Z, {{"y4", 1}}, N);
    g.in("RS2.12", s, h, {{"p0", 1}}, N, {{"p0", 1}}, N);
    g.in("RS2.13", s, h, {{"n0", 1}}, N, {{"n0", 1}}, N);
    g.evo("RS2.14", s, h, {{"y4", 1}}, {{"y5", 1}}, N);
    auto r15 = g.evo("RS2.15", s, h, {{"p0", 1}, {"n0", 1}}, {}, N);
    auto r16 = g.evo("RS2.16", s, h, {{"p0", 1}}, {{"p", 1}}, N);
    auto r17 = g.evo("RS2.17", s, h, {{"n0", 1}}, {{"n", 1}}, N);
    g.prio(r15, r16);
    g.prio(r15, r17);
    auto r18 = g.evo("RS2.18", s, h, {{"p", 2}}, {{"p", 1}}, N);
    auto r19 = g.evo("RS2.19", s, h, {{"p", 1}}, {}, N);
    g.prio(r18, r19);
    auto r20 = g.evo("RS2.20", s, h, {{"n", 2}}, {{"n", 1}}, N);
    auto r21 = g.evo("RS2.21", s, h, {{"n", 1}}, {}, N);
    g.prio(r20, r21);
    auto r22 = g.evo("RS2.22", s, h, {{"s", 1}, {"y5", 1}}, {{"s0", 1}, {"y5", 1}}, N);
    for (const auto& hi : {r16, r17, r19, r21}) g.prio(hi, r22);
    auto r23 = g.out("RS2.23", s, h, {{"y5", 1}}, N, {{"y6", 1}}, P);
    g.prio(r22, r23);
    auto r24 = g.out("RS2.24", s, h, {{"p", 10}}, P, {{"p", 1}}, P);
    auto r25 = g.out("RS2.25", s, h, {{"p", 5}}, P, {{"p", 1}}, P);
    g.prio(r24, r25);
    auto r26 = g.out("RS2.26", s, h, {{"n", 10}}, P, {{"n", 1}}, P);
    auto r27 = g.out("RS2.27", s, h, {{"n", 5}}, P, {{"n", 1}}, P);
    g.prio(r26, r27);
    auto r28 = g.in("RS2.28", s, h, {{"y6", 1}}, P, {{"rem", 1}}, Z, {{"y7", 1}});
    g.prio(r25, r28);
    g.prio(r27, r28);
    g.evo("RS2.29", s, h, {{"p", 1}}, {}, Z);
    g.evo("RS2.30", s, h, {{"n", 1}}, {}, Z);
    g.evo("RS2.31", s, h, {{"s0", 1}}, {{"s", 1}}, Z);
    g.in("RS2.74", s, h, {{"s", 1}}, Z, {{"s", 1}}, Z);
  }

  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      const MembraneIndex h = q(k, l);
      const std::string s = kl(k, l);
      g.out("RS2.32", s, h, {{"y7", 1}}, N, {{indexed("y8", k, l), 1}}, P);
      auto r33 = g.evo("RS2.33", s, h, {{"p", 1}, {"n", 1}}, {}, P);
      auto r34 = g.evo("RS2.34", s, h, {{"p", 1}}, {{"o", 1}}, P);
      auto r35 = g.evo("RS2.35", s, h, {{"n", 1}}, {}, P);
      g.prio(r33, r34);
      g.prio(r33, r35);
      g.evo("RS2.36", s, skin, {{indexed("y8", k, l), 1}}, {{indexed("y9", k, l), 1}}, Z);
      auto r37 = g.out("RS2.37", s, h, {{"o", 1}}, P,
                       {{indexed("o0", k, l), 1}, {indexed("i", k, l), 1}, {indexed("xt1", k, l), 1}}, P);
      auto r38 = g.in("RS2.38", s, h, {{indexed("y9", k, l), 1}}, P, {{"rem", 1}}, Z, {{"y10", 1}});
      g.prio(r37, r38);
    }
  }

  // Multiplier membranes share one rule shape: three y steps while negative,
  // then cancellation of p against n and export of the surviving o objects.
  struct MultiplierFamily {
    std::vector<Family> ids;  // the ten family rules in order
    std::string y8, y9, lao;
  };
  auto multiplier = [&](MembraneIndex h, const std::string& s, const MultiplierFamily& f) {
    g.evo(f.ids[0], s, h, {{"y0", 1}}, {{"y1", 1}}, N);
    g.evo(f.ids[1], s, h, {{"y1", 1}}, {{"y2", 1}}, N);
    g.evo(f.ids[2], s, h, {{"y2", 1}}, {{"y3", 1}}, N);
    g.out(f.ids[3], s, h, {{"y7", 1}}, N, {{f.y8, 1}}, P);
    auto cancel = g.evo(f.ids[4], s, h, {{"p", 1}, {"n", 1}}, {}, P);
    auto keep = g.evo(f.ids[5], s, h, {{"p", 1}}, {{"o", 1}}, P);
    auto drop = g.evo(f.ids[6], s, h, {{"n", 1}}, {}, P);
    g.prio(cancel, keep);
    g.prio(cancel, drop);
    g.evo(f.ids[7], s, skin, {{f.y8, 1}}, {{f.y9, 1}}, Z);
    auto emit = g.out(f.ids[8], s, h, {{"o", 1}}, P, {{f.lao, 1}}, P);
    auto close = g.in(f.ids[9], s, h, {{f.y9, 1}}, P, {{"rem", 1}}, Z);
    g.prio(emit, close);
  };
  for (std::size_t k = 1; k <= m; ++k) {
    multiplier(LAMB[k - 1], one(k),
               {{"RS2.39", "RS2.40", "RS2.41", "RS2.42", "RS2.43", "RS2.44", "RS2.45", "RS2.46", "RS2.47", "RS2.48"},
                indexed("yla8", k), indexed("yla9", k), indexed("lao0", k)});
  }
  // The first rule of this group is numbered RS2.48 too; its id
  // carries a distinguishing suffix while the family name stays RS2.48.
  for (std::size_t l = 1; l <= n; ++l) {
    multiplier(LAMB1[l - 1], one(l),
               {{Family("RS2.48", "RS2.48b"), "RS2.49", "RS2.50", "RS2.51", "RS2.52", "RS2.53", "RS2.54", "RS2.55", "RS2.56", "RS2.57"},
                indexed("yla1_8", l), indexed("yla1_9", l), indexed("lao1", l)});
  }
  for (std::size_t l = 1; l <= n; ++l) {
    multiplier(LAMB2[l - 1], one(l),
               {{"RS2.58", "RS2.59", "RS2.60", "RS2.61", "RS2.62", "RS2.63", "RS2.64", "RS2.65", "RS2.66", "RS2.67"},
                indexed("yla2_8", l), indexed("yla2_9", l), indexed("lao2", l)});
  }

  // Step-size counter.
  g.evo("RS2.68", "", INIT, {{indexed("count", 0), 1024}}, {{indexed("u", 0), 1}, {"s", 1}}, Z);
  {
    Items rhs;
    for (std::size_t k = 1; k <= m; ++k) {
      for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("sq", k, l), 1);
    }
    for (std::size_t k = 1; k <= m; ++k) rhs.emplace_back(indexed("sl", k), 1);
    for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("sl1", l), 1);
    for (std::size_t l = 1; l <= n; ++l) rhs.emplace_back(indexed("sl2", l), 1);
    g.out("RS2.69", "", INIT, {{"s", 1}}, Z, rhs, Z);
  }
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.in("RS2.70", kl(k, l), q(k, l), {{indexed("sq", k, l), 1}}, N, {{"s", 1}}, N);
    }
  }
  for (std::size_t k = 1; k <= m; ++k) g.in("RS2.71", one(k), LAMB[k - 1], {{indexed("sl", k), 1}}, N, {{"s", 1}}, N);
  for (std::size_t l = 1; l <= n; ++l) {
    g.in("RS2.72", one(l), LAMB1[l - 1], {{indexed("sl1", l), 1}}, N, {{"s", 1}}, N);
  }
  for (std::size_t l = 1; l <= n; ++l) {
    g.in("RS2.73", one(l), LAMB2[l - 1], {{indexed("sl2", l), 1}}, N, {{"s", 1}}, N);
  }
  g.evo("RS2.75", "", INIT, {{indexed("u", 0), 10}}, {{indexed("max", 0), 1}}, Z);
  const unsigned levels = params.counter_levels;
  for (unsigned j = 0; j <= levels; ++j) {
    g.evo("RS2.76", one(j), INIT, {{indexed("max", j), 1}, {indexed("count", 0), 1}},
          {{indexed("max", j), 1}, {indexed("count", j + 1), 1}}, Z);
  }
  for (unsigned j = 1; j <= levels; ++j) {
    if (10 + j >= 128) throw BuildError("counter_levels too large");
    g.evo("RS2.77", one(j), INIT, {{indexed("count", j), Count{1} << (10 + j)}}, {{indexed("u", j), 1}, {"s", 1}},
          Z);
  }
  for (unsigned j = 1; j <= levels; ++j) {
    g.evo("RS2.78", one(j), INIT, {{indexed("u", j), 1}, {indexed("max", j - 1), 1}}, {{indexed("max", j), 1}}, Z);
  }

  // Stage 3: comparison.
  g.in("RS3.1", "", COMP, {{"y10", static_cast<Count>(m * n)}}, Z, {{"y11", 1}}, N);
  std::vector<std::string> enter;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      enter.push_back(g.in("RS3.2", kl(k, l), COMP, {{indexed("o0", k, l), 1}}, N, {{indexed("o1", k, l), 1}}, N));
      enter.push_back(g.in("RS3.3", kl(k, l), COMP, {{indexed("xt", k, l), 1}}, N, {{indexed("xt", k, l), 1}}, N));
      enter.push_back(
          g.in("RS3.4", kl(k, l), COMP, {{indexed("xt1", k, l), 1}}, N, {{indexed("xt1", k, l), 1}}, N));
    }
  }
  auto r35 = g.out("RS3.5", "", COMP, {{"y11", 1}}, N, {{"rem", 1}}, Z, {{"y12", 1}});
  for (const auto& id : enter) g.prio(id, r35);

  std::vector<std::string> witnesses;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      const std::string s = kl(k, l);
      const std::string xt = indexed("xt", k, l);
      const std::string xt1 = indexed("xt1", k, l);
      g.out("RS3.6", s, COMP, {{indexed("o1", k, l), 1}}, Z, {{indexed("o2", k, l), 1}}, Z);
      auto r7 = g.evo("RS3.7", s, COMP, {{xt, 1}, {xt1, 1}}, {}, Z);
      auto r8 = g.evo("RS3.8", s, COMP, {{xt, 1}, {"y12", 1}}, {{"y13", 1}}, Z);
      auto r9 = g.evo("RS3.9", s, COMP, {{xt1, 1}, {"y12", 1}}, {{"y13", 1}}, Z);
      g.prio(r7, r8);
      g.prio(r7, r9);
      auto r10 = g.evo("RS3.10", s, COMP, {{xt, 1}}, {}, Z);
      auto r11 = g.evo("RS3.11", s, COMP, {{xt1, 1}}, {}, Z);
      g.prio(r8, r10);
      g.prio(r9, r11);
      witnesses.push_back(r8);
      witnesses.push_back(r9);
    }
  }
  auto r312 = g.evo("RS3.12", "", COMP, {{"y12", 1}}, {{"stop", 1}}, Z);
  for (const auto& id : witnesses) g.prio(id, r312);

  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.evo("RS3.13", kl(k, l), skin, {{indexed("o2", k, l), 1}}, {{indexed("o3", k, l), 1}}, Z);
    }
  }
  g.out("RS3.14", "", COMP, {{"stop", 1}}, Z, {{"stop", 1}}, Z);
  g.out("RS3.15", "", COMP, {{"y13", 1}}, Z, {{"y14", 1}}, Z);
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      g.evo("RS3.16", kl(k, l), skin, {{indexed("o3", k, l), 1}}, {{indexed("o4", k, l), 1}}, Z);
    }
  }
  g.in("RS3.17", "", OUTPUT, {{"stop", 1}}, Z, {{"stop", 1}}, N);
  g.in("RS3.18", "", INIT, {{"y14", 1}}, Z, {{"y15", 1}}, N);
  std::vector<std::string> deliver;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      auto r19 = g.in("RS3.19", kl(k, l), OUTPUT, {{indexed("o4", k, l), 1}}, N, {{indexed("o", k, l), 1}}, N);
      auto r20 = g.evo("RS3.20", kl(k, l), skin, {{indexed("o4", k, l), 1}}, {}, Z);
      g.prio(r19, r20);
      deliver.push_back(r19);
    }
  }
  auto r321 = g.out("RS3.21", "", OUTPUT, {{"stop", 1}}, N, {{"rem", 1}}, Z);
  for (const auto& id : deliver) g.prio(id, r321);

  std::vector<std::string> reload;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t l = 1; l <= n; ++l) {
      reload.push_back(g.in("RS3.22", kl(k, l), INIT, {{indexed("i", k, l), 1}}, N, {{indexed("x", k, l), 1}}, N));
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    reload.push_back(g.in("RS3.23", one(k), INIT, {{indexed("lao0", k), 1}}, N, {{indexed("la", k), 1}}, N));
  }
  for (std::size_t l = 1; l <= n; ++l) {
    reload.push_back(g.in("RS3.24", one(l), INIT, {{indexed("lao1", l), 1}}, N, {{indexed("la1", l), 1}}, N));
  }
  for (std::size_t l = 1; l <= n; ++l) {
    reload.push_back(g.in("RS3.25", one(l), INIT, {{indexed("lao2", l), 1}}, N, {{indexed("la2", l), 1}}, N));
  }
  auto r326 = g.out("RS3.26", "", INIT, {{"y15", 1}}, N, {{"y0", 1}}, Z, {{indexed("count", 0), 1}});
  for (const auto& id : reload) g.prio(id, r326);

  // Cleaning: rem disappears in every membrane under every polarization.
  for (MembraneIndex h = 0; h < def.membranes.size(); ++h) {
    for (Polarization pol : {Z, P, N}) {
      std::string label = def.label(h);
      std::string base = label.substr(0, label.find('{'));
      std::string suffix = label.size() > base.size() ? label.substr(base.size()) : "";
      g.evo("RS4.1", "_" + (h == skin ? std::string("skin") : base) + "_" + pol_tag(pol) + suffix, h,
            {{"rem", 1}}, {}, pol);
    }
  }

  if (auto problems = def.problems(); !problems.empty()) {
    std::string msg = "generated system is malformed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw BuildError(msg);
  }
  return gen;
}

relief::CountGrid output_counts(const Configuration& config, const GeneratedSystem& gen) {
  relief::CountGrid out(gen.m, gen.n);
  const Multiset& contents = config.contents.at(gen.membrane("OUTPUT"));
  for (std::size_t k = 1; k <= gen.m; ++k) {
    for (std::size_t l = 1; l <= gen.n; ++l) {
      if (auto id = gen.def.alphabet.find(indexed("o", k, l))) out(k - 1, l - 1) = contents.count(*id);
    }
  }
  return out;
}

relief::Matrix decode_output(const Configuration& config, const GeneratedSystem& gen) {
  if (config.contents.at(gen.membrane("OUTPUT")).empty()) {
    throw DecodeError("OUTPUT membrane is empty: the system did not halt on a converged state");
  }
  return relief::decode(output_counts(config, gen), gen.p);
}

}  // namespace psys::builder
