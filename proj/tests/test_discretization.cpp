#include "doctest.h"

#include "wentzell/errors.hpp"
#include "wentzell/hermite.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace wentzell;

TEST_CASE("mesh construction") {
  const Mesh m4 = build_mesh(4, 0.5, 1.0);
  const std::vector<double> expect{0.0, 0.25, 0.5, 0.75, 1.0};
  REQUIRE(m4.node_count() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(m4.nodes()[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(m4.x0_index() == 2);

  const Mesh m2 = build_mesh(2, 0.3, 1.0);
  REQUIRE(m2.node_count() == 3);
  CHECK(m2.nodes()[1] == 0.3);

  const Mesh g = build_mesh(8, 0.5, 2.0);
  const double w[] = {8, 4, 2, 1};
  for (std::size_t e = 0; e < 4; ++e) CHECK(g.length(e) == doctest::Approx(w[e] / 15.0 * 0.5).epsilon(1e-13));
  for (std::size_t e = 4; e < 8; ++e) CHECK(g.length(e) == doctest::Approx(g.length(7 - e)).epsilon(1e-13));
  CHECK(g.x0() == 0.5);

  CHECK_THROWS_AS(build_mesh(4, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(4, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("hermite cardinality") {
  const double xl = 0.2, xr = 0.45;
  const auto v0 = hermite_shape(xl, xr, xl, 0), d0 = hermite_shape(xl, xr, xl, 1);
  const auto v1 = hermite_shape(xl, xr, xr, 0), d1 = hermite_shape(xl, xr, xr, 1);
  CHECK(v0[0] == doctest::Approx(1.0));
  CHECK(d0[0] == doctest::Approx(0.0));
  CHECK(v0[1] == doctest::Approx(0.0));
  CHECK(d0[1] == doctest::Approx(1.0));
  CHECK(v1[2] == doctest::Approx(1.0));
  CHECK(d1[3] == doctest::Approx(1.0));
  CHECK(v1[3] == doctest::Approx(0.0));
}

TEST_CASE("interpolation reproduces cubics") {
  const DofMap map = hermite_basis(build_mesh(7, 0.37, 1.6));
  const Polynomial p({0.3, -1.2, 2.5, 1.7});
  const auto dofs = interpolate(map, p);
  for (int d = 0; d <= 3; ++d)
    for (double x = 0.0; x <= 1.0; x += 0.0625)
      CHECK(std::abs(evaluate(dofs, map, x, d) - p.derivative_at(x, d)) <= 1e-12 * std::max(1.0, std::abs(p.derivative_at(x, d))));

  const auto sq = interpolate(map, Polynomial({0.0, 0.0, 1.0}));
  CHECK(evaluate(sq, map, 0.5, 2) == doctest::Approx(2.0));
  const auto cube = interpolate(map, Polynomial({0.0, 0.0, 0.0, 1.0}));
  CHECK(evaluate(cube, map, 0.25, 3) == doctest::Approx(6.0));
  const std::vector<double> zero(map.total_dofs(), 0.0);
  CHECK(evaluate(zero, map, 0.8, 2) == 0.0);
  CHECK_THROWS_AS(evaluate(zero, map, 0.8, 4), std::invalid_argument);
}

TEST_CASE("constrained dofs evaluate to zero") {
  const Mesh mesh = build_mesh(6, 0.5, 1.0);
  const DofMap map(mesh, {DofMap::value_dof(mesh.x0_index())});
  const auto dofs = interpolate(map, Polynomial({1.0, 2.0}));
  CHECK(evaluate(dofs, map, 0.5, 0) == 0.0);
  const auto reduced = map.restrict(dofs);
  CHECK(reduced.size() == map.total_dofs() - 1);
  CHECK(map.expand(reduced) == dofs);
}

TEST_CASE("weighted rules") {
  const DofMap uni = hermite_basis(build_mesh(4, 0.5, 1.0));
  const auto weak = power_profile(0.5, 0.5);
  const auto inv = weighted_rule(uni, weak, WeightKind::CoeffReciprocalA);
  CHECK(inv.integrate(1, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inv.integrate([](double) { return 1.0; }) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));

  const auto lin = weighted_rule(uni, power_profile(0.5, 1.0), WeightKind::CoeffA);
  CHECK(lin.integrate(2, [](double) { return 1.0; }) == doctest::Approx(0.03125).epsilon(1e-14));

  const auto unit = weighted_rule(uni, constant_profile(), WeightKind::Unit);
  double total = 0.0;
  for (const auto& e : unit.elements)
    for (double w : e.weights) total += w;
  CHECK(std::abs(total - 1.0) <= 1e-14);
  CHECK(unit.exactness >= 6);

  CHECK_THROWS_AS(weighted_rule(uni, power_profile(0.5, 1.0), WeightKind::CoeffReciprocalA), DivergentIntegral);
  CHECK_NOTHROW(weighted_rule(uni, power_profile(0.5, 1.0), WeightKind::CoeffReciprocalA,
                              SingularConvention::ConstrainedFactor));
}

TEST_CASE("moment-fitted rules are exact to degree 7 near x0") {
  const DofMap map = hermite_basis(build_mesh(6, 0.4, 2.0));
  for (double K : {0.5, 1.0, 1.5}) {
    const auto c = power_profile(0.4, K, 1.3);
    for (int sign : {1, -1}) {
      if (sign < 0 && K >= 1.0) continue;
      const auto rule = weighted_rule(map, c, sign > 0 ? WeightKind::CoeffA : WeightKind::CoeffReciprocalA);
      for (std::size_t e = 0; e < map.mesh().element_count(); ++e) {
        if (!map.mesh().touches_x0(e)) continue;
        for (int m = 0; m <= 7; ++m) {
          const double exact = singular_moment(c, map.mesh().left(e), map.mesh().right(e), m, sign);
          const double q = rule.integrate(e, [m](double x) { return std::pow(x, m); });
          CHECK(q == doctest::Approx(exact).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("constrained-factor rule integrates (x-x0)^2 p / a") {
  const DofMap map = hermite_basis(build_mesh(4, 0.5, 1.0));
  const auto c = power_profile(0.5, 1.5);
  const auto rule =
      weighted_rule(map, c, WeightKind::CoeffReciprocalA, SingularConvention::ConstrainedFactor);
  // int_{0.5}^{0.75} (x-0.5)^2 / (x-0.5)^{1.5} dx = (0.25)^{1.5} / 1.5
  const double q = rule.integrate(2, [](double x) { return (x - 0.5) * (x - 0.5); });
  CHECK(q == doctest::Approx(std::pow(0.25, 1.5) / 1.5).epsilon(1e-13));
}

TEST_CASE("gauss rules") {
  const auto gl = gauss_legendre(5);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  const auto gj = gauss_jacobi(4, 0.0, -0.5);
  double t = 0.0;
  for (std::size_t i = 0; i < 4; ++i) t += gj.weights[i];
  // int_{-1}^{1} (1+y)^{-1/2} dy = 2 sqrt 2
  CHECK(t == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
}
