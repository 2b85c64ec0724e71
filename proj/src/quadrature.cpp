#include "wentzell/quadrature.hpp"

#include "wentzell/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace wentzell {

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  if (!(alpha > -1.0 && beta > -1.0)) throw std::invalid_argument("gauss_jacobi: alpha, beta must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd offd(std::max(n - 1, 0));
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    double b = 0.0;
    if (k == 1)
      b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      b = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    offd(k - 1) = std::sqrt(b);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offd, Eigen::ComputeEigenvectors);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

GaussRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

double QuadratureRule::integrate(std::size_t e, const std::function<double(double)>& f) const {
  const ElementRule& r = elements.at(e);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    double v = f(r.points[i]);
    if (r.divisor_power != 0) v /= std::pow(r.points[i] - x0, r.divisor_power);
    acc += r.weights[i] * v;
  }
  return acc;
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) acc += integrate(e, f);
  return acc;
}

namespace {

constexpr int kUnitPoints = 5;     // exact to degree 9
constexpr int kSingularPoints = 6; // exact to degree 11 against |t|^p
constexpr int kSmoothPoints = 20;

// Rule for the weight factor*|t|^p on the element [xl, xr] with one end at x0.
ElementRule jacobi_element(double xl, double xr, double x0, double p, double factor) {
  const double h = xr - xl;
  const GaussRule g = gauss_jacobi(kSingularPoints, 0.0, p);
  ElementRule r;
  const double jac = std::pow(0.5 * h, p + 1.0) * factor;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double dist = 0.5 * h * (1.0 + g.nodes[i]); // distance from x0
    r.points.push_back(xl == x0 ? x0 + dist : x0 - dist);
    r.weights.push_back(g.weights[i] * jac);
  }
  return r;
}

ElementRule legendre_element(double xl, double xr, int n, const std::function<double(double)>& w) {
  const GaussRule g = gauss_legendre(n);
  ElementRule r;
  const double mid = 0.5 * (xl + xr), half = 0.5 * (xr - xl);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double x = mid + half * g.nodes[i];
    r.points.push_back(x);
    r.weights.push_back(g.weights[i] * half * w(x));
  }
  return r;
}

} // namespace

QuadratureRule weighted_rule(const DofMap& map, const DegenerateCoefficient& coeff, WeightKind kind,
                             SingularConvention convention) {
  const Mesh& mesh = map.mesh();
  QuadratureRule rule;
  rule.kind = kind;
  rule.x0 = mesh.x0();
  rule.exactness = kind == WeightKind::Unit ? 2 * kUnitPoints - 1 : 2 * kSingularPoints - 1;
  if (coeff.x0() != mesh.x0() && coeff.profile() != Profile::NondegenerateConstant)
    throw std::invalid_argument("weighted_rule: coefficient x0 is not the mesh x0 node");

  const DegeneracyClass cls = classify(coeff);
  const bool power = coeff.profile() == Profile::PowerLaw && cls != DegeneracyClass::Nondegenerate;
  const double K = coeff.exponent();

  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double xl = mesh.left(e), xr = mesh.right(e);
    if (kind == WeightKind::Unit) {
      rule.elements.push_back(legendre_element(xl, xr, kUnitPoints, [](double) { return 1.0; }));
      continue;
    }
    const bool singular_element = power && mesh.touches_x0(e);
    if (!singular_element) {
      if (cls != DegeneracyClass::Nondegenerate && !power && mesh.touches_x0(e))
        throw std::invalid_argument("weighted_rule: custom degenerate profiles are not assembled");
      const int n = cls == DegeneracyClass::Nondegenerate ? kUnitPoints : kSmoothPoints;
      if (kind == WeightKind::CoeffA)
        rule.elements.push_back(legendre_element(xl, xr, n, [&coeff](double x) { return coeff(x); }));
      else
        rule.elements.push_back(legendre_element(xl, xr, n, [&coeff](double x) { return 1.0 / coeff(x); }));
      continue;
    }
    if (kind == WeightKind::CoeffA) {
      rule.elements.push_back(jacobi_element(xl, xr, mesh.x0(), K, coeff.scale()));
      continue;
    }
    if (cls == DegeneracyClass::Weak) {
      rule.elements.push_back(jacobi_element(xl, xr, mesh.x0(), -K, 1.0 / coeff.scale()));
      continue;
    }
    // Strong 1/a next to x0.
    if (convention != SingularConvention::ConstrainedFactor)
      throw DivergentIntegral("weighted_rule: 1/a is not integrable on an element touching x0 "
                              "(strong degeneracy); use the constrained-factor convention");
    if (K >= 3.0)
      throw DivergentIntegral("weighted_rule: |x-x0|^2/a is not integrable for K >= 3");
    ElementRule r = jacobi_element(xl, xr, mesh.x0(), 2.0 - K, 1.0 / coeff.scale());
    r.divisor_power = 2;
    rule.elements.push_back(std::move(r));
  }
  return rule;
}

} // namespace wentzell
