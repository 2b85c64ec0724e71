#pragma once

#include "wentzell/coefficient.hpp"
#include "wentzell/hermite.hpp"

#include <functional>
#include <vector>

namespace wentzell {

/// Nodes and weights on [-1,1] for the weight (1-y)^alpha (1+y)^beta,
/// alpha, beta > -1, via the Golub-Welsch eigenvalue method.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_jacobi(int n, double alpha, double beta);
GaussRule gauss_legendre(int n);

enum class WeightKind { Unit, CoeffA, CoeffReciprocalA };

/// How 1/a is handled on elements touching x0 in the strongly degenerate case.
enum class SingularConvention {
  Plain,            ///< integrand used as given; divergent for Strong 1/a
  ConstrainedFactor,///< integrand carries (x-x0)^2; rule is built for |x-x0|^2 / a
};

/// Points and weights on one element.  The rule approximates
///   integral f(x) w(x) dx  ~  sum_i weights[i] * f(points[i]) / (points[i]-x0)^divisor_power.
struct ElementRule {
  std::vector<double> points;
  std::vector<double> weights;
  int divisor_power = 0;
};

struct QuadratureRule {
  WeightKind kind = WeightKind::Unit;
  /// Polynomial degree integrated exactly against the weight on elements
  /// touching x0 and, for Unit, everywhere.  Other elements use a 20-point
  /// Gauss rule on the full integrand (accurate to rounding for PowerLaw).
  int exactness = 0;
  double x0 = 0.0;
  std::vector<ElementRule> elements;

  double integrate(std::size_t e, const std::function<double(double)>& f) const;
  double integrate(const std::function<double(double)>& f) const;
};

/// Per-element rule integrating polynomials against 1, a or 1/a.
/// Throws DivergentIntegral for CoeffReciprocalA, Strong class, Plain
/// convention, when an element touches x0.
QuadratureRule weighted_rule(const DofMap& map, const DegenerateCoefficient& coeff, WeightKind kind,
                             SingularConvention convention = SingularConvention::Plain);

} // namespace wentzell
