#include "doctest.h"

#include "wentzell/errors.hpp"
#include "wentzell/forms.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace wentzell;

namespace {

std::vector<double> ones_reduced(const AssembledSystem& s) {
  return s.restrict(interpolate(s.map, Polynomial::constant(1.0)));
}

Eigen::MatrixXd dense(const SymBandMatrix& m) {
  const auto d = m.to_dense();
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      d.data(), static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
}

} // namespace

TEST_CASE("parameter validation") {
  WentzellParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma0 = 0.5;
  CHECK_THROWS_WITH_AS(p.validate(), "gamma0 must be <= 0", std::invalid_argument);
  p = {};
  p.beta1 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("divergence assembly on constants and affine functions") {
  const DofMap map = hermite_basis(build_mesh(8, 0.5, 1.0));
  const auto weak = power_profile(0.5, 0.5);
  const auto sys = assemble_divergence(map, weak, {});
  const auto one = ones_reduced(sys);
  CHECK(sys.mass.quadratic_form(one) == doctest::Approx(1.0 + 2.0 * std::sqrt(0.5)).epsilon(1e-13));
  CHECK(std::abs(sys.energy.quadratic_form(one)) <= 1e-14 * sys.energy.max_abs());
  CHECK(sys.constrained_dofs().empty());

  WentzellParams p;
  p.gamma1 = -1.0;
  const auto lin = assemble_divergence(map, power_profile(0.5, 1.0), p);
  const auto x = lin.restrict(interpolate(map, Polynomial({0.0, 1.0})));
  CHECK(lin.energy.quadratic_form(x) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("non-divergence assembly") {
  const DofMap map = hermite_basis(build_mesh(8, 0.5, 1.0));
  WentzellParams p;
  p.beta0 = p.beta1 = 2.0;
  const auto sys = assemble_nondivergence(map, power_profile(0.5, 0.5), p);
  const auto one = ones_reduced(sys);
  CHECK(sys.mass.quadratic_form(one) == doctest::Approx(2.0 * std::sqrt(2.0) + 1.0).epsilon(1e-12));
  CHECK(std::abs(sys.energy.quadratic_form(one)) <= 1e-14 * sys.energy.max_abs());

  const auto strong = assemble_nondivergence(map, power_profile(0.5, 1.0), {});
  REQUIRE(strong.constrained_dofs().size() == 1);
  CHECK(strong.constrained_dofs()[0] == DofMap::value_dof(map.mesh().x0_index()));
  const auto u = strong.restrict(interpolate(strong.map, Polynomial({-0.5, 1.0})));
  // int (x-1/2)^2 / |x-1/2| = 1/4, boundary masses 1/4 + 1/4
  CHECK(strong.mass.quadratic_form(u) == doctest::Approx(0.75).epsilon(1e-13));

  CHECK_THROWS_AS(assemble_nondivergence(map, power_profile(0.5, 2.5), {}), HypothesisViolation);
  CHECK_THROWS_AS(assemble_divergence(map, power_profile(0.5, 2.5), {}), HypothesisViolation);
}

TEST_CASE("exact symmetry and nonnegativity") {
  for (auto form : {OperatorForm::Divergence, OperatorForm::NonDivergence}) {
    for (double K : {0.0, 0.5, 1.0, 1.5}) {
      for (double g : {0.0, -1.0}) {
        const auto coeff = K == 0.0 ? constant_profile() : power_profile(0.5, K);
        WentzellParams p;
        p.gamma0 = p.gamma1 = g;
        const auto sys = assemble(form, hermite_basis(build_mesh(16, 0.5, K >= 1.0 ? 2.0 : 1.0)), coeff, p);
        const Eigen::MatrixXd M = dense(sys.mass), Kd = dense(sys.energy);
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((Kd - Kd.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, M);
        REQUIRE(es.info() == Eigen::Success);
        const auto& ev = es.eigenvalues();
        CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff());
      }
    }
  }
}

TEST_CASE("thread count does not change assembled bits") {
  const DofMap map = hermite_basis(build_mesh(24, 0.4, 2.0));
  const auto c = power_profile(0.4, 1.5);
  const auto one = assemble_nondivergence(map, c, {}, {1});
  const auto four = assemble_nondivergence(map, c, {}, {4});
  CHECK(one.mass.to_dense() == four.mass.to_dense());
  CHECK(one.energy.to_dense() == four.energy.to_dense());
}

TEST_CASE("norms") {
  const DofMap map = hermite_basis(build_mesh(8, 0.5, 1.0));
  const auto weak = power_profile(0.5, 0.5);
  const auto one = interpolate(map, Polynomial::constant(1.0));
  CHECK(norm(one, map, weak, {}, NormKind::L2) == doctest::Approx(1.0));
  CHECK(norm(one, map, weak, {}, NormKind::AWeightedH2Semi) == doctest::Approx(0.0));
  CHECK(norm(one, map, weak, {}, NormKind::TwoA) == doctest::Approx(1.0));

  const auto q = interpolate(map, Polynomial({0.0, -1.0, 1.0}));
  const double w = norm(q, map, constant_profile(), {}, NormKind::AWeightedH2Semi);
  CHECK(w * w == doctest::Approx(4.0).epsilon(1e-13));

  const auto x = interpolate(map, Polynomial({0.0, 1.0}));
  const double xm = norm(x, map, weak, {}, NormKind::XMu);
  CHECK(xm * xm == doctest::Approx(1.0 / 3.0 + std::sqrt(0.5)).epsilon(1e-13));

  const auto strong = power_profile(0.5, 1.0);
  const auto shifted = interpolate(map, Polynomial({-0.5, 1.0}));
  const double s = norm(shifted, map, strong, {}, NormKind::InvAL2);
  CHECK(s * s == doctest::Approx(0.25).epsilon(1e-13));
  CHECK_THROWS_AS(norm(one, map, strong, {}, NormKind::InvAL2), DivergentIntegral);
}

TEST_CASE("kernel dimensions") {
  const auto count_zero = [](const AssembledSystem& s) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(s.energy), dense(s.mass));
    const auto& ev = es.eigenvalues();
    int z = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) z += std::abs(ev[i]) <= 1e-9 * ev.maxCoeff();
    return z;
  };
  const DofMap map = hermite_basis(build_mesh(16, 0.5, 1.0));
  CHECK(count_zero(assemble_divergence(map, power_profile(0.5, 0.5), {})) == 2);
  CHECK(count_zero(assemble_nondivergence(map, power_profile(0.5, 1.0), {})) == 1);
}
