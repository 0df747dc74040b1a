#include "psys/trace.hpp"

namespace psys {

void write_trace(std::ostream& out, const PSystemDef& def, const StepEvent& event) {
  for (RuleIndex r = 0; r < def.rules.size(); ++r) {
    const Count k = event.plan.counts[r];
    if (k == 0) continue;
    const Rule& rule = def.rules[r];
    out << "step=" << event.step_index << " membrane=" << def.label(rule.membrane) << " rule=" << rule.id
        << " count=" << to_string(k) << '\n';
  }
  for (MembraneIndex m = 0; m < def.membranes.size(); ++m) {
    if (event.before.polarizations[m] != event.after.polarizations[m]) {
      out << "polarization " << def.label(m) << ' ' << polarization_char(event.after.polarizations[m]) << '\n';
    }
  }
}

StepObserver trace_observer(std::ostream& out, const PSystemDef& def) {
  return [&out, &def](const StepEvent& e) { write_trace(out, def, e); };
}

}  // namespace psys
