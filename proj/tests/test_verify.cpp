#include "wentzell/verify.hpp"

#include "doctest.h"

using namespace wentzell;

TEST_CASE("green battery covers the required variants") {
  const auto battery = green_battery();
  CHECK(battery.size() >= 12);
  bool jump = false, left_end = false, right_end = false, weak = false, strong_div = false;
  for (const auto& c : battery) {
    jump = jump || c.expects_jump;
    left_end = left_end || c.coeff.x0() == 0.0;
    right_end = right_end || c.coeff.x0() == 1.0;
    weak = weak || classify(c.coeff) == DegeneracyClass::Weak;
    strong_div = strong_div || (classify(c.coeff) == DegeneracyClass::Strong && c.form == OperatorForm::Divergence);
  }
  CHECK(jump);
  CHECK(left_end);
  CHECK(right_end);
  CHECK(weak);
  CHECK(strong_div);
}

TEST_CASE("operator matrix has 16 cases at x0 = 0.5") {
  const auto m = operator_matrix();
  REQUIRE(m.size() == 16);
  for (const auto& c : m) CHECK(c.coeff.x0() == 0.5);
}

TEST_CASE("every suite passes") {
  for (const auto& suite : verification_suites()) {
    const auto rep = run_verification({suite});
    CAPTURE(suite);
    CHECK(!rep.checks.empty());
    for (const auto& c : rep.checks) {
      CAPTURE(c.name);
      CAPTURE(c.values.dump());
      CHECK(c.passed);
    }
  }
}

TEST_CASE("report json") {
  const auto rep = run_verification({"fit", "fit"});
  CHECK(rep.checks.size() == 3);
  const auto j = rep.to_json();
  CHECK(j["total"] == 3);
  CHECK(j["failed"] == 0);
  CHECK(j["passed"] == true);
  CHECK(j["checks"][0]["suite"] == "fit");
  CHECK_THROWS_AS(run_verification({"nope"}), std::invalid_argument);
}

TEST_CASE("x^2 fit is exact") {
  const auto rep = run_verification({"fit"});
  const auto& c = rep.checks.front();
  CHECK(c.values["slope"].get<double>() == 1.0);
  CHECK(c.values["intercept"].get<double>() == -1.0 / 6.0);
}
