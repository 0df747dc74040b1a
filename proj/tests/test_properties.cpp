#include "doctest.h"
#include "properties.hpp"

using namespace psys::testing;

namespace {

void expect(const PropertyResult& r, int min_cases = 100) {
  INFO(r.name);
  INFO(r.first_failure);
  CHECK(r.cases >= min_cases);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("engine steps are feasible, maximal and respect priorities") {
  expect(check_step_properties(101, 300, psys::CompatibilityMode::relaxed));
  expect(check_step_properties(102, 300, psys::CompatibilityMode::strict));
}

TEST_CASE("selected plans are among the enumerated valid plans") { expect(check_plan_oracle(103, 500)); }

TEST_CASE("runs are reproducible for a fixed seed") { expect(check_determinism(104, 150)); }

TEST_CASE("DSL round trip") { expect(check_dsl_round_trip(105, 300)); }

TEST_CASE("DSL parser on mutated input") { expect(check_dsl_fuzz(106, 500)); }

TEST_CASE("projection keeps the state non-negative") { expect(check_projection(107, 150)); }

TEST_CASE("one step commutes with relabelling") { expect(check_jacobi_purity(108, 150)); }

TEST_CASE("quantized iteration tracks the float iteration") { expect(check_quantized_float_agreement(109, 120)); }

TEST_CASE("converged float reports are feasible and stationary") { expect(check_converged_reports(110, 100)); }

TEST_CASE("the plan oracle rejects bad plans") {
  auto def = psys::dsl::parse_or_throw({"alphabet { a b c d e };\nmembranes [1];\ncontents 1 { a^3 d };\n"
                                        "rule r1: [a^2 -> b]'0 @ 1;\nrule r2: [a -> c]'0 @ 1;\n"
                                        "rule r3: [d -> e]'0 @ 1;\npriority r1 > r2 @ 1;\n"});
  auto c = psys::Configuration::initial(def);
  auto mode = psys::CompatibilityMode::relaxed;
  CHECK(plan_violation(def, mode, c, {{1, 1, 1}}).empty());
  CHECK(plan_violation(def, mode, c, {{1, 0, 1}}).find("not maximal") != std::string::npos);
  CHECK(plan_violation(def, mode, c, {{0, 3, 1}}).find("higher-priority") != std::string::npos);
  CHECK(plan_violation(def, mode, c, {{2, 0, 1}}).find("more than available") != std::string::npos);
  auto plans = all_valid_plans(def, mode, c);
  REQUIRE(plans.size() == 1);
  CHECK(plans.front().counts == std::vector<psys::Count>{1, 1, 1});
}
