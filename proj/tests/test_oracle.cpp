#include "doctest.h"

#include "wentzell/errors.hpp"
#include "wentzell/evolution.hpp"
#include "wentzell/oracle.hpp"

#include <cmath>

using namespace wentzell;

namespace {

PiecewisePolynomial one_piece(std::vector<double> c) { return PiecewisePolynomial::single(Polynomial(std::move(c))); }

AssembledSystem system_for(OperatorForm form, double K, double gamma, double grading = 1.0) {
  const auto coeff = K == 0.0 ? constant_profile() : power_profile(0.5, K);
  WentzellParams p;
  p.gamma0 = p.gamma1 = gamma;
  return assemble(form, hermite_basis(build_mesh(16, 0.5, grading)), coeff, p);
}

} // namespace

TEST_CASE("spectral decomposition") {
  const auto div = dense_decompose(system_for(OperatorForm::Divergence, 0.5, 0.0));
  CHECK(div.kernel_dimension() == 2);
  CHECK(div.min_raw() >= -1e-10 * div.scale);
  const Eigen::MatrixXd vtmv = div.eigenvectors.transpose() * div.mass * div.eigenvectors;
  CHECK((vtmv - Eigen::MatrixXd::Identity(vtmv.rows(), vtmv.cols())).cwiseAbs().maxCoeff() <= 1e-10);

  const auto strong = dense_decompose(system_for(OperatorForm::NonDivergence, 1.0, 0.0));
  CHECK(strong.kernel_dimension() == 1);
  const auto damped = dense_decompose(system_for(OperatorForm::Divergence, 1.5, -1.0));
  CHECK(damped.kernel_dimension() == 0);
  const auto graded = dense_decompose(system_for(OperatorForm::NonDivergence, 1.5, 0.0, 2.0));
  CHECK(graded.min_raw() >= -1e-10 * graded.scale);
}

TEST_CASE("exact propagator") {
  const auto sys = system_for(OperatorForm::Divergence, 0.5, -1.0);
  const auto dec = dense_decompose(sys);
  InitialSpec rnd;
  rnd.kind = InitialSpec::Kind::Random;
  rnd.seed = 11;
  const auto u0 = initial_dofs(sys, rnd);
  const auto same = exact_propagator(dec, u0, 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) CHECK(same[i] == doctest::Approx(u0[i]).epsilon(1e-8));

  const Eigen::VectorXd v = dec.eigenvectors.col(5);
  const std::vector<double> vk(v.data(), v.data() + v.size());
  const auto decayed = exact_propagator(dec, vk, 0.3);
  const double f = std::exp(-dec.eigenvalues[5] * 0.3);
  for (std::size_t i = 0; i < vk.size(); ++i) CHECK(std::abs(decayed[i] - f * vk[i]) <= 1e-8 * std::abs(v.maxCoeff()));

  double prev = sys.mass.quadratic_form(u0);
  for (double t : {0.01, 0.1, 1.0}) {
    const double now = sys.mass.quadratic_form(exact_propagator(dec, u0, t));
    CHECK(now <= prev * (1.0 + 1e-12));
    prev = now;
  }
}

TEST_CASE("implicit Euler on an eigenvector") {
  const auto sys = system_for(OperatorForm::NonDivergence, 1.5, 0.0);
  const auto dec = dense_decompose(sys);
  const Eigen::VectorXd v = dec.eigenvectors.col(3);
  const std::vector<double> vk(v.data(), v.data() + v.size());
  const double dt = 0.01;
  const auto s = step(make_state(sys, 0.0, vk), sys, dt, {}, {}, Scheme::ImplicitEuler);
  const double f = 1.0 / (1.0 + dt * dec.eigenvalues[3]);
  for (std::size_t i = 0; i < vk.size(); ++i) CHECK(std::abs(s.dofs[i] - f * vk[i]) <= 1e-8 * v.cwiseAbs().maxCoeff());
}

TEST_CASE("green identity battery") {
  const auto flat = constant_profile();
  // u = x^2 (1-x)^2 = x^2 - 2x^3 + x^4
  const auto r = green_residual(OperatorForm::Divergence, flat, one_piece({0, 0, 1, -2, 1}), one_piece({1}));
  CHECK(r.lhs == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(r.boundary == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(r.rhs == 0.0);
  CHECK(r.residual <= 1e-12);

  const auto zero = green_residual(OperatorForm::NonDivergence, flat, one_piece({0, 0, 1, -2, 1}), one_piece({0}));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.boundary == 0.0);
  CHECK(zero.rhs == 0.0);

  // weak divergence: u'' must vanish to second order at x0 for (a u'')'' in L^2
  const auto weak = power_profile(0.5, 0.5);
  const Polynomial u4 = Polynomial({0, 0, 0, 0, 1}, 0.5) + Polynomial({1, 2}, 0.0);
  const auto wr = green_residual(OperatorForm::Divergence, weak, PiecewisePolynomial::single(u4),
                                 one_piece({0.3, -1.0, 2.0, 0.5}));
  CHECK(wr.residual <= 1e-11 * wr.scale);
  CHECK_THROWS_AS(green_residual(OperatorForm::Divergence, weak, one_piece({0, 0, 1}), one_piece({1})),
                  MembershipError);

  // strong interior non-divergence: the u'' jump at x0 is needed
  const auto strong = power_profile(0.5, 1.0);
  const Polynomial left({0.0, 1.0, 2.0, 0.5}, 0.5), right({0.0, 1.0, -3.0, 1.0}, 0.5);
  const auto u = PiecewisePolynomial::two_sided(0.5, left, right);
  const auto v = PiecewisePolynomial::single(Polynomial({0.0, 2.0, 1.0, -1.0}, 0.5));
  const auto sr = green_residual(OperatorForm::NonDivergence, strong, u, v);
  CHECK(std::abs(sr.jump) > 0.0);
  CHECK(sr.residual <= 1e-12 * sr.scale);
  CHECK(sr.residual_without_jump >= std::abs(sr.jump) * (1 - 1e-12));

  // one-sided variants
  for (double x0 : {0.0, 1.0}) {
    const auto c = power_profile(x0, 1.5);
    const auto uu = PiecewisePolynomial::single(Polynomial({0.0, 1.0, 2.0, -1.0, 0.5}, x0));
    const auto vv = PiecewisePolynomial::single(Polynomial({0.0, -1.0, 0.5, 2.0}, x0));
    const auto rr = green_residual(OperatorForm::NonDivergence, c, uu, vv);
    CHECK(rr.residual <= 1e-11 * rr.scale);
  }
  CHECK_THROWS_AS(green_residual(OperatorForm::NonDivergence, strong, u, one_piece({1.0})), MembershipError);
}

TEST_CASE("hardy pieces") {
  const auto h = hardy_bound(power_profile(0.0, 1.0), 0.5);
  CHECK(h.left == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h.right == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
  CHECK(hardy_bound(power_profile(0.0, 1.5), 0.25).left == doctest::Approx(1.0).epsilon(1e-15));
  for (double K : {1.0, 1.25, 1.5, 1.75}) {
    const auto p = hardy_bound(power_profile(0.0, K), 0.3);
    CHECK(std::abs(p.left - p.left_bound) <= 1e-12 * p.left_bound);
  }
  // reflected interior frame
  const auto refl = hardy_bound(power_profile(0.6, 1.0), 0.1);
  CHECK(refl.left == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(hardy_bound(power_profile(0.0, 2.0), 0.5), DivergentIntegral);
}

TEST_CASE("best linear fit") {
  const auto sq = best_linear_fit(Polynomial({0, 0, 1}));
  CHECK(sq.slope == 1.0);
  CHECK(sq.intercept == -1.0 / 6.0);
  REQUIRE(sq.sign_changes.size() == 2);
  CHECK(sq.sign_changes[0] == doctest::Approx((1.0 - std::sqrt(1.0 / 3.0)) / 2.0).epsilon(1e-12));
  CHECK(sq.sign_changes[1] == doctest::Approx((1.0 + std::sqrt(1.0 / 3.0)) / 2.0).epsilon(1e-12));
  CHECK(std::abs(sq.orthogonality_1) <= 1e-12);
  CHECK(std::abs(sq.orthogonality_x) <= 1e-12);

  const auto aff = best_linear_fit(Polynomial({0.3, -2.0}));
  CHECK(aff.slope == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(aff.intercept == doctest::Approx(0.3).epsilon(1e-15));

  CHECK(best_linear_fit(Polynomial({0, 0, 0, 1})).sign_changes.size() >= 2);
}

TEST_CASE("pointwise bounds") {
  const auto a = power_profile(0.5, 1.0);
  CHECK(pointwise_sqrt_bound(PiecewisePolynomial::single(Polynomial::constant(0.0)), a, 0) == 0.0);
  CHECK(pointwise_sqrt_bound(PiecewisePolynomial::single(Polynomial::constant(1.0)), a, 0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(pointwise_sqrt_bound(PiecewisePolynomial::single(Polynomial({0.0, 1.0})), a, 1) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("norm equivalence probe") {
  const DofMap map = hermite_basis(build_mesh(32, 0.5, 1.0));
  const auto rep = norm_equivalence_report(map, constant_profile(), 500);
  REQUIRE(rep.levels.size() == 3);
  CHECK(rep.levels[0].max_ratio <= 20.0);
  CHECK(std::isfinite(rep.levels[0].discrete_sup));
  const auto again = norm_equivalence_report(map, constant_profile(), 500);
  CHECK(again.levels[0].max_ratio == rep.levels[0].max_ratio);
  CHECK_THROWS_AS(norm_equivalence_report(map, constant_profile(), 10), std::invalid_argument);
}
