#include "psys/engine.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace psys {

Configuration Configuration::initial(const PSystemDef& def) {
  Configuration c;
  c.contents = def.initial;
  c.polarizations.assign(def.membranes.size(), Polarization::neutral);
  return c;
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

void mix(std::uint64_t& h, const Multiset& m) {
  mix(h, m.distinct());
  for (const auto& [s, n] : m) {
    mix(h, s.value);
    mix(h, static_cast<std::uint64_t>(n));
    mix(h, static_cast<std::uint64_t>(n >> 64));
  }
}

}  // namespace

std::uint64_t digest(const Configuration& c) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < c.contents.size(); ++i) {
    mix(h, c.contents[i]);
    mix(h, static_cast<std::uint64_t>(c.polarizations[i]));
  }
  mix(h, c.environment);
  return h;
}

bool FiringPlan::empty() const {
  return std::all_of(counts.begin(), counts.end(), [](Count c) { return c == 0; });
}

Engine::Engine(PSystemDef def, CompatibilityMode mode) : def_(std::move(def)), mode_(mode) {
  def_.validate();
  const std::size_t n = def_.rules.size();
  source_.resize(n);
  preds_.resize(n);
  succs_.resize(n);
  for (RuleIndex r = 0; r < n; ++r) source_[r] = def_.source_region(def_.rules[r]);
  for (const auto& p : def_.priorities) {
    preds_[p.lower].push_back(p.higher);
    succs_[p.higher].push_back(p.lower);
  }
  // Kahn's algorithm with a min-heap on declaration index.
  std::vector<std::size_t> indegree(n);
  for (RuleIndex r = 0; r < n; ++r) indegree[r] = preds_[r].size();
  std::priority_queue<RuleIndex, std::vector<RuleIndex>, std::greater<>> ready;
  for (RuleIndex r = 0; r < n; ++r) {
    if (indegree[r] == 0) ready.push(r);
  }
  while (!ready.empty()) {
    RuleIndex r = ready.top();
    ready.pop();
    order_.push_back(r);
    for (RuleIndex s : succs_[r]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
}

bool Engine::changes_polarization(RuleIndex r) const {
  const Rule& rule = def_.rules[r];
  return rule.kind != RuleKind::evolution && rule.beta != rule.alpha;
}

bool Engine::compatible(RuleIndex a, RuleIndex b) const {
  const Rule& x = def_.rules[a];
  const Rule& y = def_.rules[b];
  if (x.kind == RuleKind::evolution || y.kind == RuleKind::evolution) return true;
  if (x.membrane != y.membrane || x.alpha != y.alpha) return true;
  if (mode_ == CompatibilityMode::relaxed && (!changes_polarization(a) || !changes_polarization(b))) {
    return true;
  }
  return x.beta == y.beta;
}

bool Engine::is_applicable(const Configuration& config, RuleIndex r) const {
  const Rule& rule = def_.rules[r];
  return config.polarizations[rule.membrane] == rule.alpha && config.contents[source_[r]].covers(rule.lhs);
}

std::vector<RuleIndex> Engine::applicable_rules(const Configuration& config, MembraneIndex m) const {
  if (m >= def_.membranes.size()) throw DefinitionError("unknown membrane index");
  std::vector<RuleIndex> out;
  for (RuleIndex r = 0; r < def_.rules.size(); ++r) {
    if (def_.rules[r].membrane == m && is_applicable(config, r)) out.push_back(r);
  }
  return out;
}

std::vector<std::string> Engine::applicable_rules(const Configuration& config, std::string_view label) const {
  std::vector<std::string> ids;
  for (RuleIndex r : applicable_rules(config, def_.membrane(label))) ids.push_back(def_.rules[r].id);
  return ids;
}

bool Engine::any_applicable(const Configuration& config) const {
  for (RuleIndex r = 0; r < def_.rules.size(); ++r) {
    if (is_applicable(config, r)) return true;
  }
  return false;
}

std::vector<RuleIndex> Engine::random_order(std::mt19937_64& rng) const {
  const std::size_t n = def_.rules.size();
  std::vector<std::size_t> indegree(n);
  std::vector<RuleIndex> ready;
  for (RuleIndex r = 0; r < n; ++r) {
    indegree[r] = preds_[r].size();
    if (indegree[r] == 0) ready.push_back(r);
  }
  std::vector<RuleIndex> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    std::size_t i = pick(rng);
    RuleIndex r = ready[i];
    ready[i] = ready.back();
    ready.pop_back();
    order.push_back(r);
    for (RuleIndex s : succs_[r]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  return order;
}

FiringPlan Engine::select_firing(const Configuration& config, SelectionPolicy policy,
                                 std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return select_firing(config, policy, rng);
}

FiringPlan Engine::select_firing(const Configuration& config, SelectionPolicy policy,
                                 std::mt19937_64& rng) const {
  const std::size_t n = def_.rules.size();
  FiringPlan plan;
  plan.counts.assign(n, 0);

  // Cheap pre-filter: rules applicable on the frozen snapshot.
  std::vector<char> candidate(n, 0);
  bool any = false;
  for (RuleIndex r = 0; r < n; ++r) {
    candidate[r] = is_applicable(config, r) ? 1 : 0;
    any = any || candidate[r];
  }
  if (!any) return plan;

  const bool randomized = policy == SelectionPolicy::seeded_random;
  std::vector<RuleIndex> randomized_order;
  if (randomized) randomized_order = random_order(rng);
  const std::vector<RuleIndex>& order = randomized ? randomized_order : order_;

  std::vector<Multiset> residual = config.contents;
  // Per membrane, the beta committed by fired rules that constrain others.
  std::vector<std::optional<Polarization>> committed(def_.membranes.size());

  auto can_fire_more = [&](RuleIndex r) {
    const Rule& rule = def_.rules[r];
    return config.polarizations[rule.membrane] == rule.alpha && residual[source_[r]].covers(rule.lhs);
  };

  bool first_pass = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (RuleIndex r : order) {
      if (!candidate[r]) continue;
      const Rule& rule = def_.rules[r];
      if (rule.kind != RuleKind::evolution) {
        const bool constrains = mode_ == CompatibilityMode::strict || changes_polarization(r);
        const auto& c = committed[rule.membrane];
        if (constrains && c && *c != rule.beta) continue;
      }
      bool blocked = false;
      for (RuleIndex hi : preds_[r]) {
        if (can_fire_more(hi)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      Count k = residual[source_[r]].max_copies(rule.lhs);
      if (k == 0) continue;
      if (randomized && first_pass) {
        // Explore partial firings; later passes top up to maximality.
        std::uniform_int_distribution<std::uint64_t> pick(0, static_cast<std::uint64_t>(std::min<Count>(k, 64)));
        Count chosen = pick(rng);
        if (chosen == 64 || chosen > k) chosen = k;
        k = chosen;
        if (k == 0) continue;
      }
      residual[source_[r]].subtract(rule.lhs, k);
      plan.counts[r] = checked_add(plan.counts[r], k);
      if (rule.kind != RuleKind::evolution &&
          (mode_ == CompatibilityMode::strict || changes_polarization(r))) {
        committed[rule.membrane] = rule.beta;
      }
      changed = true;
    }
    if (first_pass && randomized) changed = true;  // always run a greedy top-up pass
    first_pass = false;
  }
  return plan;
}

Configuration Engine::apply_step(const Configuration& config, const FiringPlan& plan) const {
  const std::size_t n = def_.rules.size();
  if (plan.counts.size() != n) throw std::logic_error("firing plan does not match rule count");
  for (RuleIndex a = 0; a < n; ++a) {
    if (plan.counts[a] == 0) continue;
    if (config.polarizations[def_.rules[a].membrane] != def_.rules[a].alpha) {
      throw std::logic_error("rule '" + def_.rules[a].id + "' fired against its polarization guard");
    }
    for (RuleIndex b = a + 1; b < n; ++b) {
      if (plan.counts[b] != 0 && !compatible(a, b)) {
        throw std::logic_error("incompatible rules '" + def_.rules[a].id + "' and '" + def_.rules[b].id + "'");
      }
    }
  }

  Configuration next = config;
  // Consumptions first (all against C_t), then productions.
  for (RuleIndex r = 0; r < n; ++r) {
    if (plan.counts[r] == 0) continue;
    try {
      next.contents[source_[r]].subtract(def_.rules[r].lhs, plan.counts[r]);
    } catch (const std::logic_error&) {
      throw std::logic_error("infeasible firing plan at rule '" + def_.rules[r].id + "'");
    }
  }
  for (RuleIndex r = 0; r < n; ++r) {
    const Count k = plan.counts[r];
    if (k == 0) continue;
    const Rule& rule = def_.rules[r];
    next.contents[rule.membrane].add(rule.inside, k);
    if (!rule.outside.empty()) {
      const auto& parent = def_.membranes[rule.membrane].parent;
      if (parent) {
        next.contents[*parent].add(rule.outside, k);
      } else {
        next.environment.add(rule.outside, k);
      }
    }
    if (changes_polarization(r)) next.polarizations[rule.membrane] = rule.beta;
  }
  next.step_index = config.step_index + 1;
  return next;
}

RunReport Engine::run(const RunOptions& options) const {
  RunReport report;
  std::mt19937_64 rng(options.seed);
  Configuration current = Configuration::initial(def_);
  while (true) {
    FiringPlan plan = select_firing(current, options.policy, rng);
    if (plan.empty()) {
      report.halted = true;
      break;
    }
    if (report.steps >= options.max_steps) break;
    Configuration next = apply_step(current, plan);
    ++report.steps;
    if (options.observer) {
      options.observer(StepEvent{next.step_index, plan, current, next, digest(next)});
    }
    current = std::move(next);
    if (options.stop_when && options.stop_when(current)) break;
  }
  report.output = def_.output ? current.contents[*def_.output] : current.environment;
  report.final = std::move(current);
  return report;
}

RunReport run(const PSystemDef& def, const RunOptions& options) { return Engine(def).run(options); }

}  // namespace psys
