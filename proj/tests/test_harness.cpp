#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "psys/harness/cli.hpp"
#include "psys/harness/compare.hpp"
#include "psys/harness/table_io.hpp"

using namespace psys;
using namespace psys::harness;

namespace fs = std::filesystem;

namespace {

const fs::path kData = PSYS_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "psys_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

relief::Matrix from_rows(std::vector<std::vector<double>> rows) {
  relief::Matrix m(rows.size(), rows.front().size());
  for (std::size_t k = 0; k < m.rows; ++k) {
    for (std::size_t l = 0; l < m.cols; ++l) m(k, l) = rows[k][l];
  }
  return m;
}

}  // namespace

TEST_CASE("single-cell percent error") {
  ErrorStats s = compare(from_rows({{16.10}}), from_rows({{17.48}}));
  CHECK(s.per_cell(0, 0) == doctest::Approx(7.8947).epsilon(1e-4));
  CHECK(s.max == s.per_cell(0, 0));
  CHECK(s.cells == 1);
}

TEST_CASE("identical tables have zero error") {
  relief::Matrix a = from_rows({{1, 2, 3}, {4, 5, 6}});
  ErrorStats s = compare(a, a);
  CHECK(s.average == 0);
  CHECK(s.median == 0);
  CHECK(s.max == 0);
  CHECK(s.count_above(0) == 0);
}

TEST_CASE("zero reference cells are excluded and counted") {
  ErrorStats s = compare(from_rows({{1, 2}}), from_rows({{0, 4}}));
  CHECK(std::isnan(s.per_cell(0, 0)));
  CHECK(s.excluded == 1);
  CHECK(s.cells == 1);
  CHECK(s.average == doctest::Approx(50));
}

TEST_CASE("the reference is the denominator") {
  relief::Matrix a = from_rows({{1}}), b = from_rows({{2}});
  CHECK(compare(a, b).max == doctest::Approx(50));
  CHECK(compare(b, a).max == doctest::Approx(100));
  CHECK_THROWS_AS(compare(from_rows({{1, 2}}), from_rows({{1}, {2}})), ShapeError);
}

TEST_CASE("median of an even count averages the middle pair") {
  ErrorStats s = compare(from_rows({{1, 2, 3, 4}}), from_rows({{1, 1, 1, 1}}));
  // errors 0, 100, 200, 300
  CHECK(s.median == doctest::Approx(150));
  CHECK(s.average == doctest::Approx(150));
  CHECK(s.count_above(150) == 2);
}

TEST_CASE("Katrina tables give average 1.98, median 0.82, max 7.89") {
  CsvTable cand = load_csv(kData / "tables" / "katrina_psystem.csv");
  CsvTable ref = load_csv(kData / "tables" / "katrina_reference.csv");
  REQUIRE(cand.values.rows == 3);
  REQUIRE(cand.values.cols == 10);
  ErrorStats s = compare(cand.values, ref.values);

  std::vector<double> errs;
  for (std::size_t i = 0; i < ref.values.data.size(); ++i) {
    errs.push_back(std::abs(cand.values.data[i] - ref.values.data[i]) / std::abs(ref.values.data[i]) * 100);
  }
  std::sort(errs.begin(), errs.end());
  double mean = 0;
  for (double e : errs) mean += e / static_cast<double>(errs.size());
  CHECK(s.average == doctest::Approx(mean));
  CHECK(s.median == doctest::Approx((errs[14] + errs[15]) / 2));
  CHECK(s.max == errs.back());

  CHECK(std::abs(s.average - 1.98) <= 0.01);
  CHECK(std::abs(s.median - 0.82) <= 0.01);
  CHECK(std::abs(s.max - 7.89) <= 0.01);
  CHECK(s.count_above(5) == 4);
  CHECK(s.cells == 30);
}

TEST_CASE("shipped tables parse") {
  for (const char* name : {"case1", "case2", "case3", "case4", "katrina"}) {
    CAPTURE(name);
    CsvTable a = load_csv(kData / "tables" / (std::string(name) + "_psystem.csv"));
    CsvTable b = load_csv(kData / "tables" / (std::string(name) + "_reference.csv"));
    CHECK(a.values.rows == b.values.rows);
    CHECK(a.values.cols == b.values.cols);
  }
}

TEST_CASE("CSV round trip") {
  relief::Matrix m = from_rows({{0.1, 1.0 / 3.0}, {352.50012, 0}});
  std::stringstream buf;
  write_csv(buf, m, {{"command", "solve"}, {"tol", "1e-05"}});
  CsvTable back = read_csv(buf);
  CHECK(back.values == m);
  REQUIRE(back.meta.size() == 2);
  CHECK(back.meta[1].second == "1e-05");

  std::stringstream fixed;
  write_csv(fixed, m, {}, 5);
  CsvTable rounded = read_csv(fixed);
  CHECK(rounded.values(1, 0) == 352.50012);
  CHECK(rounded.values(0, 1) == 0.33333);
}

TEST_CASE("CSV errors") {
  std::istringstream missing("k,l,value\n1,1,1\n2,2,1\n");
  CHECK_THROWS_AS(read_csv(missing), TableError);
  std::istringstream dup("k,l,value\n1,1,1\n1,1,2\n");
  CHECK_THROWS_AS(read_csv(dup), TableError);
  std::istringstream header("a,b,c\n1,1,1\n");
  CHECK_THROWS_AS(read_csv(header), TableError);
  std::istringstream junk("k,l,value\n1,1,abc\n");
  CHECK_THROWS_AS(read_csv(junk), TableError);
}

TEST_CASE("cli: solve on the derived instance") {
  const std::string inst = (kData / "instances" / "ex_derived_1x1.json").string();
  Outcome o = run({"solve", "--instance", inst, "--variant", "simplified", "--tol", "1e-5"});
  CHECK(o.code == kSuccess);
  std::istringstream in(o.out);
  CsvTable t = read_csv(in);
  CHECK(std::abs(t.values(0, 0) - 0.5) < 1e-3);

  Outcome capped = run({"solve", "--instance", inst, "--max-iter", "2"});
  CHECK(capped.code == kNotConverged);

  Outcome full = run({"solve", "--instance", inst, "--variant", "full"});
  CHECK(full.code == kInputError);
  CHECK(full.err.find("vis_k") != std::string::npos);
}

TEST_CASE("cli: input errors exit with 2 and a position") {
  Outcome bogus = run({"solve", "--bogus"});
  CHECK(bogus.code == kInputError);
  CHECK(bogus.err.find("argument 2 ('--bogus')") != std::string::npos);

  Outcome nofile = run({"oracle", "--instance", "/nonexistent/x.json"});
  CHECK(nofile.code == kInputError);

  Outcome none = run({});
  CHECK(none.code == kInputError);

  Outcome missing = run({"simulate"});
  CHECK(missing.code == kInputError);
  CHECK(missing.err.find("--instance") != std::string::npos);

  fs::path bad = scratch("infeasible.json");
  std::ofstream(bad) << R"({"m":1,"n":1,"s":[1],"d_lo":[5],"d_hi":[6],"gamma":[[1]],"omega":[1],)"
                     << R"("beta":[1],"cost_a":[[1]],"cost_b":[[0]]})";
  Outcome infeasible = run({"solve", "--instance", bad.string()});
  CHECK(infeasible.code == kInputError);
  CHECK(infeasible.err.find("infeasible") != std::string::npos);

  fs::path broken = scratch("broken.psys");
  std::ofstream(broken) << "alphabet { a };\nmembranes [1];\nrule r1 [a -> a]'0 @ 1;\n";
  Outcome parse = run({"trace", "--system", broken.string()});
  CHECK(parse.code == kInputError);
  CHECK(parse.err.find(":3:") != std::string::npos);
}

TEST_CASE("cli: simulate and oracle agree at p = 3") {
  const std::string inst = (kData / "instances" / "ex_derived_1x1.json").string();
  Outcome sim = run({"simulate", "--instance", inst, "--p", "3"});
  Outcome orc = run({"oracle", "--instance", inst, "--p", "3"});
  REQUIRE(sim.code == kSuccess);
  REQUIRE(orc.code == kSuccess);
  std::istringstream a(sim.out), b(orc.out);
  CHECK(read_csv(a).values == read_csv(b).values);

  Outcome sim_json = run({"simulate", "--instance", inst, "--p", "3", "--format", "json"});
  CHECK(sim_json.out.find("\"q_counts\"") != std::string::npos);
  CHECK(sim_json.out.find("\"manifest\"") != std::string::npos);
}

TEST_CASE("cli: identical manifests give byte-identical output") {
  const std::string inst = (kData / "instances" / "ex_derived_1x1.json").string();
  for (const char* cmd : {"solve", "oracle", "simulate"}) {
    for (const char* fmt : {"csv", "json"}) {
      CAPTURE(cmd);
      CAPTURE(fmt);
      std::vector<std::string> args{cmd, "--instance", inst, "--p", "3", "--format", fmt, "--seed", "7"};
      CHECK(run(args).out == run(args).out);
    }
  }
}

TEST_CASE("cli: compare, build and trace") {
  Outcome cmp = run({"compare", "--candidate", (kData / "tables" / "katrina_psystem.csv").string(), "--reference",
                     (kData / "tables" / "katrina_reference.csv").string()});
  CHECK(cmp.code == kSuccess);
  CHECK(cmp.out.find("# above_5_percent=4") != std::string::npos);

  Outcome shape = run({"compare", "--candidate", (kData / "tables" / "case1_psystem.csv").string(), "--reference",
                       (kData / "tables" / "katrina_reference.csv").string()});
  CHECK(shape.code == kInputError);

  const std::string inst = (kData / "instances" / "ex_derived_1x1.json").string();
  fs::path emitted = scratch("derived.psys");
  Outcome b = run({"build", "--instance", inst, "--p", "3", "--levels", "2", "--emit", emitted.string()});
  CHECK(b.code == kSuccess);
  CHECK(b.out.find("membranes=12") != std::string::npos);

  fs::path example = scratch("example.psys");
  std::ofstream(example) << "alphabet { a b c d e };\nmembranes [1];\ncontents 1 { a^3 d };\n"
                         << "rule r1: [a^2 -> b]'0 @ 1;\nrule r2: [a -> c]'0 @ 1;\nrule r3: [d -> e]'0 @ 1;\n"
                         << "priority r1 > r2 @ 1;\n";
  Outcome t = run({"trace", "--system", example.string()});
  CHECK(t.code == kSuccess);
  CHECK(t.out.find("# halted=true steps=1") != std::string::npos);

  Outcome from_emitted = run({"trace", "--system", emitted.string(), "--max-steps", "50"});
  CHECK(from_emitted.code == kNotConverged);
}
