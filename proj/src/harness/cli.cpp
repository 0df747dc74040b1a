#include "psys/harness/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "psys/builder/builder.hpp"
#include "psys/dsl.hpp"
#include "psys/harness/compare.hpp"
#include "psys/harness/table_io.hpp"
#include "psys/relief/euler.hpp"
#include "psys/relief/quantized.hpp"
#include "psys/trace.hpp"

namespace psys::harness {

namespace {

using nlohmann::json;
using Meta = std::vector<std::pair<std::string, std::string>>;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string instance;
  std::string system;
  std::string variant = "simplified";
  std::string stop = "residual";
  std::string format = "csv";
  std::string out;
  std::string emit;
  std::string candidate;
  std::string reference;
  std::string timestamp = "none";
  std::string mode = "relaxed";
  std::string policy = "deterministic";
  double tol = 1e-5;
  std::uint64_t max_iter = 100000;
  std::uint64_t max_steps = 50'000'000;
  std::uint64_t seed = 0;
  unsigned p = 5;
  unsigned levels = 20;
};

json matrix_json(const relief::Matrix& m) {
  json rows = json::array();
  for (std::size_t k = 0; k < m.rows; ++k) {
    json row = json::array();
    for (std::size_t l = 0; l < m.cols; ++l) row.push_back(m(k, l));
    rows.push_back(std::move(row));
  }
  return rows;
}

json count_grid_json(const relief::CountGrid& g) {
  json rows = json::array();
  for (std::size_t k = 0; k < g.rows; ++k) {
    json row = json::array();
    for (std::size_t l = 0; l < g.cols; ++l) row.push_back(to_string(g(k, l)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json count_vector_json(const std::vector<Count>& v) {
  json a = json::array();
  for (Count c : v) a.push_back(to_string(c));
  return a;
}

json manifest_json(const RunManifest& m) {
  json j = json::object();
  for (const auto& [k, v] : m.entries()) j[k] = v;
  return j;
}

json stage_summary(const std::vector<builder::StageRecord>& stages) {
  json runs = json::array();
  for (const auto& s : stages) {
    if (!runs.empty()) {
      json& last = runs.back();
      if (last["init"] == s.init && last["update"] == s.update && last["comparison"] == s.comparison &&
          last["complete"] == s.complete) {
        last["iterations"] = last["iterations"].get<std::uint64_t>() + 1;
        continue;
      }
    }
    runs.push_back({{"first_iteration", s.iteration},
                    {"iterations", 1},
                    {"init", s.init},
                    {"update", s.update},
                    {"comparison", s.comparison},
                    {"complete", s.complete}});
  }
  return runs;
}

relief::ReliefInstance require_instance(const Options& o) {
  if (o.instance.empty()) throw InputError("--instance is required");
  relief::ReliefInstance inst;
  try {
    inst = relief::load_instance(o.instance);
  } catch (const relief::InstanceError& e) {
    throw InputError(std::string("--instance: ") + e.what());
  }
  if (auto problems = relief::validate(inst); !problems.empty()) {
    std::string msg = "--instance " + o.instance + ": invalid instance";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  return inst;
}

RunManifest manifest_for(const std::string& command, const Options& o, bool uses_p) {
  RunManifest m;
  m.command = command;
  m.instance_path = o.instance;
  m.variant = command == "solve" ? o.variant : (uses_p ? "quantized" : "");
  if (uses_p) m.p = o.p;
  m.tol = o.tol;
  m.max_iter = o.max_iter;
  m.seed = o.seed;
  m.timestamp = o.timestamp;
  return m;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("--out: cannot write '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

Meta with(const RunManifest& m, const Meta& extra) {
  Meta all = m.entries();
  all.insert(all.end(), extra.begin(), extra.end());
  return all;
}

json instance_mirror(const relief::ReliefInstance& inst) { return json::parse(relief::instance_to_json(inst)); }

int cmd_solve(const Options& o, std::ostream& out) {
  relief::Variant variant = o.variant == "full" ? relief::Variant::full : relief::Variant::simplified;
  relief::ReliefInstance inst = require_instance(o);
  if (variant == relief::Variant::full && inst.vis_k.size() != inst.n) {
    throw InputError("--variant full needs vis_k in the instance");
  }
  relief::EquilibriumReport r = relief::solve(inst, variant, o.tol, o.max_iter,
                                              o.stop == "q" ? relief::StopRule::q_only : relief::StopRule::residual);
  RunManifest m = manifest_for("solve", o, false);
  Sink sink(o.out, out);
  if (o.format == "json") {
    json j = instance_mirror(inst);
    j["manifest"] = manifest_json(m);
    j["result"] = {{"q", matrix_json(r.state.q)},
                   {"lam", r.state.lam},
                   {"lam1", r.state.lam1},
                   {"lam2", r.state.lam2},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"stop", o.stop},
                   {"visibility_capped", r.visibility_capped},
                   {"feasibility", {{"supply", r.feasibility.supply},
                                    {"lower", r.feasibility.lower},
                                    {"upper", r.feasibility.upper}}},
                   {"stationarity", matrix_json(r.stationarity)}};
    *sink << j.dump(2) << '\n';
  } else {
    write_csv(*sink, r.state.q,
              with(m, {{"iterations", std::to_string(r.iterations)},
                       {"converged", r.converged ? "true" : "false"},
                       {"stop", o.stop},
                       {"max_feasibility_violation", format_double(r.feasibility.max_violation())}}));
  }
  return r.converged ? kSuccess : kNotConverged;
}

void write_quantized(const Options& o, std::ostream& out, const RunManifest& m, const relief::ReliefInstance& inst,
                     const relief::CountGrid& q, const Meta& extra, json result) {
  Sink sink(o.out, out);
  relief::Matrix decoded = relief::decode(q, o.p);
  if (o.format == "json") {
    json j = instance_mirror(inst);
    j["manifest"] = manifest_json(m);
    result["q"] = matrix_json(decoded);
    result["q_counts"] = count_grid_json(q);
    j["result"] = std::move(result);
    *sink << j.dump(2) << '\n';
  } else {
    write_csv(*sink, decoded, with(m, extra), o.p);
  }
}

int cmd_oracle(const Options& o, std::ostream& out) {
  relief::ReliefInstance inst = require_instance(o);
  relief::QuantizedReport r;
  try {
    r = relief::solve_quantized(inst, o.p, o.max_iter, o.levels);
  } catch (const relief::InstanceError& e) {
    throw InputError(std::string("--p: ") + e.what());
  }
  RunManifest m = manifest_for("oracle", o, true);
  write_quantized(o, out, m, inst, r.state.q,
                  {{"iterations", std::to_string(r.iterations)}, {"converged", r.converged ? "true" : "false"}},
                  {{"iterations", r.iterations},
                   {"converged", r.converged},
                   {"lam_counts", count_vector_json(r.state.lam)},
                   {"lam1_counts", count_vector_json(r.state.lam1)},
                   {"lam2_counts", count_vector_json(r.state.lam2)}});
  return r.converged ? kSuccess : kNotConverged;
}

builder::GeneratedSystem build_from(const Options& o, const relief::ReliefInstance& inst) {
  try {
    return builder::build({inst, o.p, o.levels});
  } catch (const builder::BuildError& e) {
    throw InputError(e.what());
  }
}

CompatibilityMode mode_of(const Options& o) {
  return o.mode == "strict" ? CompatibilityMode::strict : CompatibilityMode::relaxed;
}

SelectionPolicy policy_of(const Options& o) {
  return o.policy == "random" ? SelectionPolicy::seeded_random : SelectionPolicy::deterministic;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  relief::ReliefInstance inst = require_instance(o);
  builder::GeneratedSystem gen = build_from(o, inst);
  builder::SimulationOptions so;
  so.max_steps = o.max_steps;
  so.max_iterations = o.max_iter;
  so.mode = mode_of(o);
  so.policy = policy_of(o);
  so.seed = o.seed;
  builder::SimulationReport r = builder::simulate(gen, so);
  const bool halted = r.run.halted;
  relief::CountGrid q = halted ? builder::output_counts(r.run.final, gen) : r.trajectory.back().q;
  RunManifest m = manifest_for("simulate", o, true);
  const std::uint64_t iterations = halted ? r.stages.size() : r.stages.size() - 1;
  write_quantized(o, out, m, inst, q,
                  {{"iterations", std::to_string(iterations)},
                   {"steps", std::to_string(r.run.steps)},
                   {"halted", halted ? "true" : "false"}},
                  {{"iterations", iterations},
                   {"steps", r.run.steps},
                   {"halted", halted},
                   {"stages", stage_summary(r.stages)}});
  return halted ? kSuccess : kNotConverged;
}

int cmd_build(const Options& o, std::ostream& out) {
  relief::ReliefInstance inst = require_instance(o);
  builder::GeneratedSystem gen = build_from(o, inst);
  const std::string text = dsl::serialize(gen.def);
  if (!o.emit.empty()) {
    std::ofstream f(o.emit);
    if (!f) throw InputError("--emit: cannot write '" + o.emit + "'");
    f << text;
    Sink sink(o.out, out);
    *sink << "membranes=" << gen.def.membranes.size() << " rules=" << gen.def.rules.size()
          << " priorities=" << gen.def.priorities.size() << " file=" << o.emit << '\n';
  } else {
    Sink sink(o.out, out);
    *sink << text;
  }
  return kSuccess;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (o.candidate.empty() || o.reference.empty()) throw InputError("--candidate and --reference are required");
  CsvTable cand, ref;
  try {
    cand = load_csv(o.candidate);
    ref = load_csv(o.reference);
  } catch (const TableError& e) {
    throw InputError(e.what());
  }
  ErrorStats s;
  try {
    s = compare(cand.values, ref.values);
  } catch (const ShapeError& e) {
    throw InputError(e.what());
  }
  RunManifest m = manifest_for("compare", o, false);
  Sink sink(o.out, out);
  if (o.format == "json") {
    json j;
    j["manifest"] = manifest_json(m);
    j["manifest"]["candidate"] = o.candidate;
    j["manifest"]["reference"] = o.reference;
    json cells = json::array();
    for (std::size_t k = 0; k < s.per_cell.rows; ++k) {
      json row = json::array();
      for (std::size_t l = 0; l < s.per_cell.cols; ++l) {
        double v = s.per_cell(k, l);
        row.push_back(std::isnan(v) ? json(nullptr) : json(v));
      }
      cells.push_back(std::move(row));
    }
    j["result"] = {{"average", s.average}, {"median", s.median}, {"max", s.max},
                   {"cells", s.cells},     {"excluded", s.excluded}, {"above_5_percent", s.count_above(5)},
                   {"percent_error", cells}};
    *sink << j.dump(2) << '\n';
  } else {
    write_csv(*sink, s.per_cell,
              with(m, {{"candidate", o.candidate},
                       {"reference", o.reference},
                       {"average", format_double(s.average)},
                       {"median", format_double(s.median)},
                       {"max", format_double(s.max)},
                       {"cells", std::to_string(s.cells)},
                       {"excluded", std::to_string(s.excluded)},
                       {"above_5_percent", std::to_string(s.count_above(5))}}));
  }
  return kSuccess;
}

int cmd_trace(const Options& o, std::ostream& out) {
  PSystemDef def;
  if (!o.system.empty()) {
    std::ifstream f(o.system);
    if (!f) throw InputError("--system: cannot open '" + o.system + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    try {
      def = dsl::parse_or_throw({buf.str(), o.system});
    } catch (const DefinitionError& e) {
      throw InputError(e.what());
    }
  } else {
    def = build_from(o, require_instance(o)).def;
  }
  Engine engine(std::move(def), mode_of(o));
  Sink sink(o.out, out);
  RunOptions run;
  run.policy = policy_of(o);
  run.seed = o.seed;
  run.max_steps = o.max_steps;
  run.observer = trace_observer(*sink, engine.def());
  RunReport r = engine.run(run);
  *sink << "# halted=" << (r.halted ? "true" : "false") << " steps=" << r.steps << '\n';
  return r.halted ? kSuccess : kNotConverged;
}

// Position of the first argument CLI11 complained about, for the message.
std::string locate(const std::vector<std::string>& args, const std::string& message) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && message.find(args[i]) != std::string::npos) {
      return "argument " + std::to_string(i + 1) + " ('" + args[i] + "'): ";
    }
  }
  return "";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Relief-game membrane system toolkit", "psys"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--instance", o.instance, "relief instance JSON")->check(CLI::ExistingFile);
    sub->add_option("--tol", o.tol, "float convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", o.max_iter, "iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "seed for the random selection policy");
    sub->add_option("--out", o.out, "write the result here instead of stdout");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--timestamp", o.timestamp, "recorded verbatim in the manifest");
    sub->add_option("--p", o.p, "precision exponent, P = 10^p")->check(CLI::Range(1u, 30u));
    sub->add_option("--levels", o.levels, "step-size counter levels")->check(CLI::Range(0u, 100u));
  };
  auto engine_flags = [&](CLI::App* sub) {
    sub->add_option("--max-steps", o.max_steps, "engine step limit")->check(CLI::PositiveNumber);
    sub->add_option("--mode", o.mode, "compatibility mode")->check(CLI::IsMember({"relaxed", "strict"}));
    sub->add_option("--policy", o.policy, "rule selection")->check(CLI::IsMember({"deterministic", "random"}));
  };

  CLI::App* solve = app.add_subcommand("solve", "float projected Euler iteration");
  common(solve);
  solve->add_option("--variant", o.variant, "full or simplified")->check(CLI::IsMember({"full", "simplified"}));
  solve->add_option("--stop", o.stop, "stopping test: residual (scaled by a_t) or q (raw change of q)")
      ->check(CLI::IsMember({"residual", "q"}));
  CLI::App* simulate = app.add_subcommand("simulate", "build the membrane system and run it");
  common(simulate);
  engine_flags(simulate);
  CLI::App* oracle = app.add_subcommand("oracle", "integer-quantized Euler iteration");
  common(oracle);
  CLI::App* build = app.add_subcommand("build", "generate the membrane system as .psys text");
  common(build);
  build->add_option("--emit", o.emit, "output .psys file");
  CLI::App* cmp = app.add_subcommand("compare", "percent-error statistics of two k,l,value tables");
  common(cmp);
  cmp->add_option("--candidate", o.candidate, "candidate table")->check(CLI::ExistingFile);
  cmp->add_option("--reference", o.reference, "reference table (denominator)")->check(CLI::ExistingFile);
  CLI::App* trace = app.add_subcommand("trace", "run with the step trace on");
  common(trace);
  engine_flags(trace);
  trace->add_option("--system", o.system, ".psys file to run instead of a generated system")
      ->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << locate(args, e.what()) << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*oracle) return cmd_oracle(o, out);
    if (*build) return cmd_build(o, out);
    if (*cmp) return cmd_compare(o, out);
    if (*trace) return cmd_trace(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace psys::harness
