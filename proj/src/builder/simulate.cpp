#include "psys/builder/builder.hpp"

namespace psys::builder {

StageTracker::StageTracker(const GeneratedSystem& gen)
    : gen_(gen),
      y0_(gen.symbol("y0")),
      y1_(gen.symbol("y1")),
      y10_(gen.symbol("y10")),
      init_(gen.membrane("INIT")) {
  for (std::size_t k = 1; k <= gen.m; ++k) {
    for (std::size_t l = 1; l <= gen.n; ++l) {
      workers_.push_back(gen.membrane(indexed("Q", k, l)));
      x_.push_back(gen.symbol(indexed("x", k, l)));
    }
  }
  for (std::size_t k = 1; k <= gen.m; ++k) {
    workers_.push_back(gen.membrane(indexed("LAMB", k)));
    la_.push_back(gen.symbol(indexed("la", k)));
  }
  for (std::size_t l = 1; l <= gen.n; ++l) {
    workers_.push_back(gen.membrane(indexed("LAMB1", l)));
    workers_.push_back(gen.membrane(indexed("LAMB2", l)));
    la1_.push_back(gen.symbol(indexed("la1", l)));
    la2_.push_back(gen.symbol(indexed("la2", l)));
  }
}

bool StageTracker::init_done(const Configuration& c) const {
  for (MembraneIndex h : workers_) {
    if (c.contents[h].count(y1_) == 0) return false;
  }
  return true;
}

void StageTracker::begin_iteration(const Configuration& c) {
  StageRecord rec;
  rec.iteration = records_.size();
  rec.start_step = c.step_index;
  records_.push_back(rec);
  phase_ = Phase::init;

  relief::QuantizedState st;
  st.t = rec.iteration;
  st.q = relief::CountGrid(gen_.m, gen_.n);
  const Multiset& init = c.contents[init_];
  for (std::size_t i = 0; i < x_.size(); ++i) st.q.data[i] = init.count(x_[i]);
  for (SymbolId s : la_) st.lam.push_back(init.count(s));
  for (SymbolId s : la1_) st.lam1.push_back(init.count(s));
  for (SymbolId s : la2_) st.lam2.push_back(init.count(s));
  trajectory_.push_back(std::move(st));
}

void StageTracker::start(const Configuration& initial) {
  records_.clear();
  trajectory_.clear();
  begin_iteration(initial);
}

void StageTracker::observe(const Configuration& after) {
  if (records_.empty()) return;
  StageRecord& rec = records_.back();
  switch (phase_) {
    case Phase::init:
      ++rec.init;
      if (init_done(after)) phase_ = Phase::update;
      break;
    case Phase::update:
      ++rec.update;
      if (after.contents[0].count(y10_) >= gen_.m * gen_.n) phase_ = Phase::comparison;
      break;
    case Phase::comparison:
      ++rec.comparison;
      if (after.contents[0].count(y0_) > 0) {
        rec.complete = true;
        begin_iteration(after);
      }
      break;
  }
}

void StageTracker::finish(bool halted) {
  if (halted && !records_.empty() && phase_ == Phase::comparison) records_.back().complete = true;
}

StepObserver StageTracker::observer() {
  return [this](const StepEvent& e) { observe(e.after); };
}

SimulationReport simulate(const GeneratedSystem& gen, const SimulationOptions& options) {
  Engine engine(gen.def, options.mode);
  StageTracker tracker(gen);
  tracker.start(Configuration::initial(engine.def()));
  RunOptions run;
  run.policy = options.policy;
  run.seed = options.seed;
  run.max_steps = options.max_steps;
  run.observer = [&](const StepEvent& e) {
    tracker.observe(e.after);
    if (options.extra_observer) options.extra_observer(e);
  };
  if (options.max_iterations > 0) {
    run.stop_when = [&](const Configuration&) { return tracker.records().size() > options.max_iterations; };
  }
  SimulationReport report;
  report.run = engine.run(run);
  tracker.finish(report.run.halted);
  report.stages = tracker.records();
  report.trajectory = tracker.trajectory();
  return report;
}

}  // namespace psys::builder
