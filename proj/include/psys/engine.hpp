#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "psys/system.hpp"

namespace psys {

/// Dynamic snapshot C_t. The membrane tree is static, so contents and
/// polarizations are indexed like PSystemDef::membranes.
struct Configuration {
  std::vector<Multiset> contents;
  std::vector<Polarization> polarizations;
  Multiset environment;
  std::uint64_t step_index = 0;

  static Configuration initial(const PSystemDef& def);

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// FNV-1a over contents, polarizations and environment (step index excluded).
std::uint64_t digest(const Configuration& c);

/// Application count per rule, indexed like PSystemDef::rules.
struct FiringPlan {
  std::vector<Count> counts;

  bool empty() const;
  Count count(RuleIndex r) const { return counts.at(r); }
  friend bool operator==(const FiringPlan&, const FiringPlan&) = default;
};

enum class SelectionPolicy : std::uint8_t { deterministic, seeded_random };

/// How send-in/send-out rules on the same membrane may be combined in a step.
///
/// strict: every communication rule fired on h with the same alpha must share
///   beta (a polarization-keeping rule conflicts with a changing one).
/// relaxed: rules with beta == alpha never conflict; only rules that change the
///   polarization must agree. This is the reading under which the relief
///   system's stages take 3/9/6 steps.
enum class CompatibilityMode : std::uint8_t { relaxed, strict };

struct StepEvent {
  std::uint64_t step_index;  // index of the configuration produced
  const FiringPlan& plan;
  const Configuration& before;
  const Configuration& after;
  std::uint64_t digest;  // digest(after)
};

using StepObserver = std::function<void(const StepEvent&)>;

struct RunOptions {
  SelectionPolicy policy = SelectionPolicy::deterministic;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 1'000'000;
  StepObserver observer;
  /// Checked after every step; returning true ends the run (halted = false).
  std::function<bool(const Configuration&)> stop_when;
};

struct RunReport {
  Configuration final;
  bool halted = false;
  std::uint64_t steps = 0;
  Multiset output;
};

/// Executes a PSystemDef under maximal parallelism with weak priorities.
/// Holds its own copy of the definition; const member functions are safe to
/// call concurrently.
class Engine {
 public:
  explicit Engine(PSystemDef def, CompatibilityMode mode = CompatibilityMode::relaxed);

  const PSystemDef& def() const { return def_; }
  CompatibilityMode compatibility() const { return mode_; }

  /// Rules attached to membrane `m` whose guard and left-hand side are
  /// satisfied in `config` (ignoring priorities and other rules).
  std::vector<RuleIndex> applicable_rules(const Configuration& config, MembraneIndex m) const;
  std::vector<std::string> applicable_rules(const Configuration& config, std::string_view label) const;
  bool is_applicable(const Configuration& config, RuleIndex r) const;
  bool any_applicable(const Configuration& config) const;

  FiringPlan select_firing(const Configuration& config, SelectionPolicy policy, std::uint64_t seed) const;
  FiringPlan select_firing(const Configuration& config, SelectionPolicy policy, std::mt19937_64& rng) const;

  /// Commits `plan` against the frozen `config`. Throws std::logic_error when
  /// the plan is infeasible or incompatible.
  Configuration apply_step(const Configuration& config, const FiringPlan& plan) const;

  RunReport run(const RunOptions& options) const;

  /// True when `a` and `b` may fire in the same step under this engine's mode.
  bool compatible(RuleIndex a, RuleIndex b) const;
  const std::vector<RuleIndex>& higher_priority(RuleIndex r) const { return preds_[r]; }
  MembraneIndex source_region(RuleIndex r) const { return source_[r]; }

 private:
  bool changes_polarization(RuleIndex r) const;
  std::vector<RuleIndex> random_order(std::mt19937_64& rng) const;

  PSystemDef def_;
  CompatibilityMode mode_;
  std::vector<MembraneIndex> source_;
  std::vector<std::vector<RuleIndex>> preds_;
  std::vector<std::vector<RuleIndex>> succs_;
  std::vector<RuleIndex> order_;  // topological, ties by declaration order
};

/// Convenience wrapper: Engine(def).run(options).
RunReport run(const PSystemDef& def, const RunOptions& options);

}  // namespace psys
