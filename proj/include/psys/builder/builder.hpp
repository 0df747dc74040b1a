#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "psys/engine.hpp"
#include "psys/relief/instance.hpp"
#include "psys/relief/quantized.hpp"

namespace psys::builder {

struct BuildParams {
  relief::ReliefInstance instance;
  unsigned p = 5;
  /// count_j levels of the step-size counter; halvings stop at 10 + levels.
  unsigned counter_levels = 20;
};

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `x{1,2}`, `la{1}`, `y10` ... (indices are 1-based).
std::string indexed(std::string_view base, std::size_t k);
std::string indexed(std::string_view base, std::size_t k, std::size_t l);

struct GeneratedSystem {
  PSystemDef def;
  std::size_t m = 0;
  std::size_t n = 0;
  unsigned p = 0;
  unsigned counter_levels = 0;
  relief::QuantizedConstants constants;
  /// Rule family name ("RS2.6") -> ids of the rules instantiated from it.
  std::map<std::string, std::vector<std::string>> rule_index;

  SymbolId symbol(const std::string& name) const;
  MembraneIndex membrane(const std::string& label) const { return def.membrane(label); }
};

/// Instantiates every rule family of the relief system for the instance.
/// Throws BuildError when the instance is invalid or an encoded constant
/// that must be positive floors to zero.
GeneratedSystem build(const BuildParams& params);

/// Membrane count of the generated structure: 4 + 2(mn + m + 2n).
std::size_t expected_membrane_count(std::size_t m, std::size_t n);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// o_{k,l} counts of OUTPUT.
relief::CountGrid output_counts(const Configuration& config, const GeneratedSystem& gen);
/// output_counts / 10^p. Throws DecodeError when OUTPUT is empty.
relief::Matrix decode_output(const Configuration& config, const GeneratedSystem& gen);

/// Step counts of one iteration of the generated system.
struct StageRecord {
  std::uint64_t iteration = 0;
  std::uint64_t start_step = 0;
  unsigned init = 0;
  unsigned update = 0;
  unsigned comparison = 0;
  bool complete = false;
};

/// Follows a run step by step, splitting it into iterations and stages and
/// reading the per-iteration state (q from INIT's x objects, multipliers from
/// its la objects) at each iteration start.
///
/// An iteration starts when the skin holds y0. Initialization ends once every
/// Q/LAMB membrane holds y1, Update ends when y10^(mn) reaches the skin, and
/// Comparison ends when y0 is back in the skin or the system halts.
class StageTracker {
 public:
  explicit StageTracker(const GeneratedSystem& gen);

  void start(const Configuration& initial);
  void observe(const Configuration& after);
  /// Call once after the run; closes the running iteration if `halted`.
  void finish(bool halted);

  StepObserver observer();

  const std::vector<StageRecord>& records() const { return records_; }
  const std::vector<relief::QuantizedState>& trajectory() const { return trajectory_; }

 private:
  enum class Phase { init, update, comparison };

  bool init_done(const Configuration& c) const;
  void begin_iteration(const Configuration& c);

  const GeneratedSystem& gen_;
  Phase phase_ = Phase::init;
  std::vector<StageRecord> records_;
  std::vector<relief::QuantizedState> trajectory_;
  SymbolId y0_, y1_, y10_;
  MembraneIndex init_;
  std::vector<MembraneIndex> workers_;
  std::vector<SymbolId> x_, la_, la1_, la2_;
};

struct SimulationOptions {
  std::uint64_t max_steps = 50'000'000;
  /// Stop once this many iterations have completed (0: no limit).
  std::uint64_t max_iterations = 0;
  CompatibilityMode mode = CompatibilityMode::relaxed;
  SelectionPolicy policy = SelectionPolicy::deterministic;
  std::uint64_t seed = 0;
  StepObserver extra_observer;
};

struct SimulationReport {
  RunReport run;
  std::vector<StageRecord> stages;
  std::vector<relief::QuantizedState> trajectory;  // state at each iteration start
};

SimulationReport simulate(const GeneratedSystem& gen, const SimulationOptions& options = {});

}  // namespace psys::builder
