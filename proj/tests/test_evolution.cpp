#include "doctest.h"

#include "wentzell/errors.hpp"
#include "wentzell/evolution.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

using namespace wentzell;

namespace {

AssembledSystem weak_system(double gamma = 0.0, std::size_t n = 16) {
  WentzellParams p;
  p.gamma0 = p.gamma1 = gamma;
  return assemble_divergence(hermite_basis(build_mesh(n, 0.5, 1.0)), power_profile(0.5, 0.5), p);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

TEST_CASE("resolvent on the affine kernel") {
  const auto sys = weak_system();
  const auto one = sys.restrict(interpolate(sys.map, Polynomial::constant(1.0)));
  const auto r = resolvent_solve(sys, 2.0, one);
  const auto half = sys.restrict(interpolate(sys.map, Polynomial::constant(0.5)));
  CHECK(max_diff(r.solution, half) <= 1e-10);
  CHECK(r.relative_residual <= 1e-10);

  const auto x = sys.restrict(interpolate(sys.map, Polynomial({0.0, 1.0})));
  CHECK(max_diff(resolvent_solve(sys, 1.0, x).solution, x) <= 1e-10);

  const std::vector<double> zero(sys.size(), 0.0);
  CHECK(max_diff(resolvent_solve(sys, 1.0, zero).solution, zero) == 0.0);
  CHECK_THROWS_AS(resolvent_solve(sys, 0.0, zero), NotCoercive);
}

TEST_CASE("steady state and contraction") {
  const auto sys = weak_system();
  const auto one = sys.restrict(interpolate(sys.map, Polynomial::constant(1.0)));
  for (auto scheme : {Scheme::ImplicitEuler, Scheme::CrankNicolson}) {
    const auto s = step(make_state(sys, 0.0, one), sys, 0.1, {}, {}, scheme);
    CHECK(max_diff(s.dofs, one) <= 1e-11);
  }
  InitialSpec rnd;
  rnd.kind = InitialSpec::Kind::Random;
  rnd.seed = 7;
  const auto traj = run(sys, initial_dofs(sys, rnd), Forcing{}, 1.0, 0.01, Scheme::ImplicitEuler);
  CHECK(traj.completed);
  CHECK(traj.states.size() == 101);
  CHECK(traj.norms_nonincreasing());
  CHECK(traj.max_relative_slack() <= 1e-12);
}

TEST_CASE("boundary dissipation with negative gamma") {
  const auto sys = weak_system(-1.0);
  const auto one = sys.restrict(interpolate(sys.map, Polynomial::constant(1.0)));
  const auto traj = run(sys, one, Forcing{}, 1.0, 0.05, Scheme::ImplicitEuler);
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k)
    CHECK(traj.states[k + 1].norm_sq < traj.states[k].norm_sq);
}

TEST_CASE("cached norms match recomputation") {
  const auto sys = weak_system();
  InitialSpec rnd;
  rnd.kind = InitialSpec::Kind::Random;
  rnd.seed = 3;
  const auto traj = run(sys, initial_dofs(sys, rnd), Forcing{}, 0.5, 0.1, Scheme::CrankNicolson);
  for (const auto& s : traj.states) {
    CHECK(sys.mass.quadratic_form(s.dofs) == doctest::Approx(s.norm_sq).epsilon(1e-12));
    CHECK(sys.energy.quadratic_form(s.dofs) == doctest::Approx(s.energy).epsilon(1e-12));
  }
}

TEST_CASE("forced energy bound") {
  ProblemConfig cfg;
  cfg.n = 16;
  cfg.dt = 0.02;
  cfg.forcing.kind = ForcingSpec::Kind::Polynomial;
  cfg.forcing.coefficients = {1.0, -2.0, 3.0};
  cfg.forcing.factor = {TimeFactor::Kind::Sine, 3.0};
  const auto res = run(cfg);
  CHECK(res.trajectory.completed);
  CHECK(res.trajectory.energy_bound_holds());
  CHECK(res.trajectory.contraction_ok());
  CHECK(res.trajectory.max_relative_slack() <= 1e-12);
}

TEST_CASE("manufactured solution converges") {
  double prev = 1e300;
  for (std::size_t n : {8, 16, 32}) {
    ProblemConfig cfg;
    cfg.n = n;
    cfg.T = 0.1;
    cfg.dt = 0.001;
    cfg.scheme = Scheme::CrankNicolson;
    cfg.initial.kind = InitialSpec::Kind::Manufactured;
    cfg.forcing.kind = ForcingSpec::Kind::Manufactured;
    const auto res = run(cfg);
    const auto P = default_manufactured_profile();
    const double err = l2_error(res.system.expand(res.trajectory.states.back().dofs), res.system.map,
                                [&](double x) { return std::exp(-0.1) * P(x); });
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("config validation and csv") {
  ProblemConfig cfg;
  cfg.dt = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 0.25;
  const auto res = run(cfg);
  std::ostringstream os;
  write_trajectory_csv(os, res.trajectory);
  const std::string out = os.str();
  CHECK(out.rfind("step,t,norm_mu_sq,energy_form,slack\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 6);
}

TEST_CASE("crank-nicolson midpoint energy identity with rough data") {
  ProblemConfig cfg;
  cfg.form = OperatorForm::NonDivergence;
  cfg.n = 16;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.initial.kind = InitialSpec::Kind::Random;
  cfg.initial.seed = 4;
  cfg.forcing.kind = ForcingSpec::Kind::Polynomial;
  cfg.forcing.coefficients = {1.0, 2.0};
  const auto tr = run(cfg).trajectory;
  REQUIRE(tr.completed);
  CHECK(tr.max_relative_slack() <= 1e-12);
  CHECK(tr.energy_bound_holds());
}
