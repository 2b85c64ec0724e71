#pragma once

#include <span>
#include <vector>

namespace wentzell {

/// Real polynomial p(x) = sum_k c[k] (x - origin)^k.
///
/// Storing an origin keeps cubic pieces on tiny graded elements well
/// conditioned; operations that combine two polynomials shift the second
/// one onto the origin of the first.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs, double origin = 0.0);

  static Polynomial constant(double value);
  static Polynomial monomial(int degree, double scale = 1.0, double origin = 0.0);

  double origin() const noexcept { return origin_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  /// Degree after trimming trailing zeros; -1 for the zero polynomial.
  int degree() const noexcept;
  bool is_zero() const noexcept { return degree() < 0; }

  double operator()(double x) const;
  double derivative_at(double x, int order) const;

  Polynomial derivative(int order = 1) const;
  /// Antiderivative vanishing at the origin.
  Polynomial antiderivative() const;
  double integrate(double lo, double hi) const;

  /// Same polynomial expanded about a new origin (Taylor shift).
  Polynomial shifted(double new_origin) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

private:
  std::vector<double> coeffs_;
  double origin_ = 0.0;
};

/// Polynomial pieces over a partition 0 = b[0] < b[1] < ... < b[m] = 1.
/// Piece i lives on [b[i], b[i+1]].
struct PiecewisePolynomial {
  std::vector<double> breaks;
  std::vector<Polynomial> pieces;

  static PiecewisePolynomial single(Polynomial p);
  /// Two pieces split at `split`; split in {0,1} collapses to one piece.
  static PiecewisePolynomial two_sided(double split, Polynomial left, Polynomial right);

  std::size_t piece_index(double x) const;
  /// Value of the d-th derivative; at a breakpoint the right piece is used
  /// unless `from_left` is set.
  double eval(double x, int d = 0, bool from_left = false) const;
};

} // namespace wentzell
