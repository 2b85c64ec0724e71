#include "wentzell/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wentzell {

Polynomial::Polynomial(std::vector<double> coeffs, double origin)
    : coeffs_(std::move(coeffs)), origin_(origin) {}

Polynomial Polynomial::constant(double value) { return Polynomial({value}); }

Polynomial Polynomial::monomial(int degree, double scale, double origin) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = scale;
  return Polynomial(std::move(c), origin);
}

int Polynomial::degree() const noexcept {
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
    if (coeffs_[k] != 0.0) return k;
  return -1;
}

double Polynomial::operator()(double x) const {
  const double t = x - origin_;
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Polynomial::derivative_at(double x, int order) const {
  return derivative(order)(x);
}

Polynomial Polynomial::derivative(int order) const {
  std::vector<double> c = coeffs_;
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1) return Polynomial({0.0}, origin_);
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    c = std::move(d);
  }
  return Polynomial(std::move(c), origin_);
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> c(coeffs_.size() + 1, 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    c[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(c), origin_);
}

double Polynomial::integrate(double lo, double hi) const {
  const Polynomial prim = antiderivative();
  return prim(hi) - prim(lo);
}

Polynomial Polynomial::shifted(double new_origin) const {
  // p(x) = sum c_k (x - o)^k = sum c_k ((x - n) + (n - o))^k
  const double delta = new_origin - origin_;
  const std::size_t m = coeffs_.size();
  std::vector<double> out(m, 0.0);
  if (delta == 0.0) return Polynomial(coeffs_, new_origin);
  // Repeated synthetic division (Horner shift), O(m^2).
  out = coeffs_;
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (std::size_t k = m - 1; k > i; --k) out[k - 1] += delta * out[k];
  return Polynomial(std::move(out), new_origin);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  const Polynomial rhs = other.origin_ == origin_ ? other : other.shifted(origin_);
  std::vector<double> c(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
  for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) c[k] += rhs.coeffs_[k];
  return Polynomial(std::move(c), origin_);
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  const Polynomial rhs = other.origin_ == origin_ ? other : other.shifted(origin_);
  if (coeffs_.empty() || rhs.coeffs_.empty()) return Polynomial({0.0}, origin_);
  std::vector<double> c(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * rhs.coeffs_[j];
  return Polynomial(std::move(c), origin_);
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return Polynomial(std::move(c), origin_);
}

PiecewisePolynomial PiecewisePolynomial::single(Polynomial p) {
  return PiecewisePolynomial{{0.0, 1.0}, {std::move(p)}};
}

PiecewisePolynomial PiecewisePolynomial::two_sided(double split, Polynomial left, Polynomial right) {
  if (split <= 0.0) return single(std::move(right));
  if (split >= 1.0) return single(std::move(left));
  return PiecewisePolynomial{{0.0, split, 1.0}, {std::move(left), std::move(right)}};
}

std::size_t PiecewisePolynomial::piece_index(double x) const {
  if (pieces.empty()) throw std::logic_error("empty piecewise polynomial");
  const auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, x);
  return static_cast<std::size_t>(it - (breaks.begin() + 1));
}

double PiecewisePolynomial::eval(double x, int d, bool from_left) const {
  std::size_t i = piece_index(x);
  if (from_left && i > 0 && x == breaks[i]) --i;
  return pieces[i].derivative_at(x, d);
}

} // namespace wentzell
