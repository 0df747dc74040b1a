#pragma once

#include <ostream>

#include "psys/engine.hpp"

namespace psys {

/// Writes the line-oriented trace format (docs/trace-format.md):
///
///   step=<n> membrane=<label> rule=<id> count=<k>
///   polarization <label> <0|+|->
///
/// Rule lines follow declaration order; polarization lines follow membrane
/// order and appear only for membranes whose polarization changed.
void write_trace(std::ostream& out, const PSystemDef& def, const StepEvent& event);

/// Observer that streams write_trace output. `out` must outlive the run.
StepObserver trace_observer(std::ostream& out, const PSystemDef& def);

}  // namespace psys
