#include "psys/system.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace psys {

char polarization_char(Polarization p) {
  switch (p) {
    case Polarization::neutral: return '0';
    case Polarization::positive: return '+';
    case Polarization::negative: return '-';
  }
  return '?';
}

MembraneIndex PSystemDef::add_skin(std::string label) {
  if (!membranes.empty()) throw DefinitionError("skin membrane already defined");
  membranes.push_back({std::move(label), std::nullopt, {}});
  initial.emplace_back();
  return 0;
}

MembraneIndex PSystemDef::add_membrane(std::string label, MembraneIndex parent) {
  if (parent >= membranes.size()) throw DefinitionError("unknown parent membrane");
  MembraneIndex idx = membranes.size();
  membranes.push_back({std::move(label), parent, {}});
  membranes[parent].children.push_back(idx);
  initial.emplace_back();
  return idx;
}

RuleIndex PSystemDef::add_rule(Rule rule) {
  rules.push_back(std::move(rule));
  return rules.size() - 1;
}

void PSystemDef::add_priority(std::string_view higher_id, std::string_view lower_id) {
  auto hi = find_rule(higher_id);
  auto lo = find_rule(lower_id);
  if (!hi) throw DefinitionError("priority references unknown rule '" + std::string(higher_id) + "'");
  if (!lo) throw DefinitionError("priority references unknown rule '" + std::string(lower_id) + "'");
  priorities.push_back({*hi, *lo});
}

std::optional<MembraneIndex> PSystemDef::find_membrane(std::string_view label) const {
  for (MembraneIndex i = 0; i < membranes.size(); ++i) {
    if (membranes[i].label == label) return i;
  }
  return std::nullopt;
}

std::optional<RuleIndex> PSystemDef::find_rule(std::string_view id) const {
  for (RuleIndex i = 0; i < rules.size(); ++i) {
    if (rules[i].id == id) return i;
  }
  return std::nullopt;
}

MembraneIndex PSystemDef::membrane(std::string_view label) const {
  auto m = find_membrane(label);
  if (!m) throw DefinitionError("unknown membrane label '" + std::string(label) + "'");
  return *m;
}

MembraneIndex PSystemDef::source_region(const Rule& rule) const {
  if (rule.kind == RuleKind::send_in) return *membranes.at(rule.membrane).parent;
  return rule.membrane;
}

namespace {

bool symbols_known(const Multiset& m, const Alphabet& a) {
  return std::all_of(m.begin(), m.end(), [&](const auto& e) { return e.first.value < a.size(); });
}

}  // namespace

std::vector<std::string> PSystemDef::problems() const {
  std::vector<std::string> out;
  if (membranes.empty()) {
    out.emplace_back("no membranes defined");
    return out;
  }
  if (initial.size() != membranes.size()) out.emplace_back("initial contents do not match membrane count");

  std::set<std::string> labels;
  for (MembraneIndex i = 0; i < membranes.size(); ++i) {
    const auto& m = membranes[i];
    if (m.label.empty()) out.emplace_back("empty membrane label");
    if (!labels.insert(m.label).second) out.push_back("duplicate membrane label '" + m.label + "'");
    if ((i == 0) != !m.parent.has_value()) out.push_back("membrane '" + m.label + "' has an invalid parent");
    if (m.parent && *m.parent >= i) out.push_back("membrane '" + m.label + "' must follow its parent");
  }
  for (MembraneIndex i = 0; i < initial.size(); ++i) {
    if (!symbols_known(initial[i], alphabet)) out.push_back("initial contents use unregistered symbols");
  }

  std::set<std::string> ids;
  for (const auto& r : rules) {
    if (!ids.insert(r.id).second) out.push_back("duplicate rule id '" + r.id + "'");
    if (r.membrane >= membranes.size()) {
      out.push_back("rule '" + r.id + "' references an unknown membrane");
      continue;
    }
    if (r.lhs.empty()) out.push_back("rule '" + r.id + "' has an empty left-hand side");
    if (!symbols_known(r.lhs, alphabet) || !symbols_known(r.inside, alphabet) ||
        !symbols_known(r.outside, alphabet)) {
      out.push_back("rule '" + r.id + "' uses unregistered symbols");
    }
    if (r.kind == RuleKind::evolution) {
      if (!r.outside.empty()) out.push_back("evolution rule '" + r.id + "' produces outside its membrane");
      if (r.beta != r.alpha) out.push_back("evolution rule '" + r.id + "' changes polarization");
    }
    if (r.kind == RuleKind::send_in && r.membrane == 0) {
      out.push_back("send-in rule '" + r.id + "' targets the skin membrane");
    }
  }

  // Priority relation: valid indices, irreflexive, acyclic.
  std::vector<std::vector<RuleIndex>> succ(rules.size());
  bool indices_ok = true;
  for (const auto& p : priorities) {
    if (p.higher >= rules.size() || p.lower >= rules.size()) {
      out.emplace_back("priority references an unknown rule");
      indices_ok = false;
      continue;
    }
    if (p.higher == p.lower) out.push_back("rule '" + rules[p.higher].id + "' has priority over itself");
    succ[p.higher].push_back(p.lower);
  }
  if (indices_ok) {
    std::vector<int> state(rules.size(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<RuleIndex> stack;
    bool reported = false;
    for (RuleIndex start = 0; start < rules.size() && !reported; ++start) {
      if (state[start] != 0) continue;
      // Iterative DFS keeping the path so the cycle can be named.
      std::vector<std::pair<RuleIndex, std::size_t>> dfs{{start, 0}};
      state[start] = 1;
      stack.assign(1, start);
      while (!dfs.empty() && !reported) {
        auto& [node, next] = dfs.back();
        if (next < succ[node].size()) {
          RuleIndex child = succ[node][next++];
          if (state[child] == 1) {
            std::string msg = "cyclic priority among rules:";
            auto pos = std::find(stack.begin(), stack.end(), child);
            for (auto it = pos; it != stack.end(); ++it) msg += " '" + rules[*it].id + "'";
            out.push_back(msg);
            reported = true;
          } else if (state[child] == 0) {
            state[child] = 1;
            stack.push_back(child);
            dfs.push_back({child, 0});
          }
        } else {
          state[node] = 2;
          stack.pop_back();
          dfs.pop_back();
        }
      }
    }
  }

  if (output && *output >= membranes.size()) out.emplace_back("output membrane does not exist");
  return out;
}

void PSystemDef::validate() const {
  auto p = problems();
  if (p.empty()) return;
  std::string msg = "invalid P system definition:";
  for (const auto& s : p) msg += "\n  " + s;
  throw DefinitionError(msg);
}

namespace {

using NamedMultiset = std::map<std::string, Count>;

NamedMultiset named(const Multiset& m, const Alphabet& a) {
  NamedMultiset out;
  for (const auto& [s, n] : m) out.emplace(a.name(s), n);
  return out;
}

}  // namespace

bool structurally_equal(const PSystemDef& a, const PSystemDef& b) {
  if (a.membranes.size() != b.membranes.size() || a.rules.size() != b.rules.size()) return false;

  std::set<std::string> sa(a.alphabet.names().begin(), a.alphabet.names().end());
  std::set<std::string> sb(b.alphabet.names().begin(), b.alphabet.names().end());
  if (sa != sb) return false;

  auto parent_label = [](const PSystemDef& d, MembraneIndex i) -> std::string {
    return d.membranes[i].parent ? d.membranes[*d.membranes[i].parent].label : std::string{};
  };
  for (MembraneIndex i = 0; i < a.membranes.size(); ++i) {
    auto j = b.find_membrane(a.membranes[i].label);
    if (!j) return false;
    if ((i == 0) != (*j == 0)) return false;
    if (parent_label(a, i) != parent_label(b, *j)) return false;
    if (named(a.initial[i], a.alphabet) != named(b.initial[*j], b.alphabet)) return false;
  }

  for (RuleIndex i = 0; i < a.rules.size(); ++i) {
    const Rule& x = a.rules[i];
    const Rule& y = b.rules[i];
    if (x.id != y.id || x.kind != y.kind || x.alpha != y.alpha || x.beta != y.beta) return false;
    if (a.label(x.membrane) != b.label(y.membrane)) return false;
    if (named(x.lhs, a.alphabet) != named(y.lhs, b.alphabet)) return false;
    if (named(x.inside, a.alphabet) != named(y.inside, b.alphabet)) return false;
    if (named(x.outside, a.alphabet) != named(y.outside, b.alphabet)) return false;
  }

  auto pairs = [](const PSystemDef& d) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& p : d.priorities) s.emplace(d.rules[p.higher].id, d.rules[p.lower].id);
    return s;
  };
  if (pairs(a) != pairs(b)) return false;

  auto out_label = [](const PSystemDef& d) {
    return d.output ? d.membranes[*d.output].label : std::string{};
  };
  return a.output.has_value() == b.output.has_value() && out_label(a) == out_label(b);
}

}  // namespace psys
