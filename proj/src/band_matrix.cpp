#include "wentzell/band_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wentzell {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), lower_(n * (bandwidth + 1), 0.0), extended_(lower_.size(), 0.0L) {}

double SymBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i >= n_) throw std::out_of_range("SymBandMatrix index");
  if (i - j > bw_) return 0.0;
  return lower_[index(i, j)];
}

long double SymBandMatrix::extended_at(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0L;
  return extended_[index(i, j)];
}

void SymBandMatrix::add(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > bw_) throw std::out_of_range("SymBandMatrix::add outside band");
  const std::size_t k = index(i, j);
  extended_[k] += v;
  lower_[k] = static_cast<double>(extended_[k]);
}

void SymBandMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > bw_) throw std::out_of_range("SymBandMatrix::set outside band");
  lower_[index(i, j)] = v;
  extended_[index(i, j)] = v;
}

std::vector<double> SymBandMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("SymBandMatrix::multiply size mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t jlo = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = jlo; j < i; ++j) {
      const double a = lower_[index(i, j)];
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
    y[i] += lower_[index(i, i)] * x[i];
  }
  return y;
}

std::vector<long double> SymBandMatrix::multiply_extended(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("SymBandMatrix::multiply size mismatch");
  std::vector<long double> y(n_, 0.0L);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t jlo = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = jlo; j < i; ++j) {
      const long double a = extended_[index(i, j)];
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
    y[i] += extended_[index(i, i)] * x[i];
  }
  return y;
}

double SymBandMatrix::quadratic_form(std::span<const double> x) const { return bilinear_form(x, x); }

double SymBandMatrix::bilinear_form(std::span<const double> x, std::span<const double> y) const {
  const auto ay = multiply_extended(y);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n_; ++i) acc += x[i] * ay[i];
  return static_cast<double>(acc);
}

SymBandMatrix SymBandMatrix::combined(double alpha, const SymBandMatrix& other, double beta) const {
  if (other.n_ != n_) throw std::invalid_argument("SymBandMatrix::combined size mismatch");
  SymBandMatrix out(n_, std::max(bw_, other.bw_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = (i > out.bw_ ? i - out.bw_ : 0); j <= i; ++j) {
      const std::size_t k = out.index(i, j);
      out.extended_[k] = static_cast<long double>(alpha) * extended_at(i, j) +
                         static_cast<long double>(beta) * other.extended_at(i, j);
      out.lower_[k] = static_cast<double>(out.extended_[k]);
    }
  return out;
}

SymBandMatrix SymBandMatrix::submatrix(std::span<const std::size_t> keep) const {
  // Removing indices never widens the band.
  SymBandMatrix out(keep.size(), bw_);
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = (a > bw_ ? a - bw_ : 0); b <= a; ++b) {
      out.lower_[out.index(a, b)] = (*this)(keep[a], keep[b]);
      out.extended_[out.index(a, b)] = extended_at(keep[a], keep[b]);
    }
  return out;
}

std::vector<double> SymBandMatrix::to_dense() const {
  std::vector<double> d(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = (i > bw_ ? i - bw_ : 0); j <= i; ++j) {
      const double v = lower_[index(i, j)];
      d[i * n_ + j] = v;
      d[j * n_ + i] = v;
    }
  return d;
}

double SymBandMatrix::max_abs() const {
  double m = 0.0;
  for (double v : lower_) m = std::max(m, std::abs(v));
  return m;
}

void SymBandMatrix::write_triplets(std::ostream& os) const {
  os << "# symband n=" << n_ << " bandwidth=" << bw_ << '\n';
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = (i > bw_ ? i - bw_ : 0); j <= i; ++j)
      os << i << ' ' << j << ' ' << lower_[index(i, j)] << '\n';
  os.flags(flags);
  os.precision(prec);
}

SymBandMatrix SymBandMatrix::read_triplets(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_triplets: missing header");
  std::size_t n = 0, bw = 0;
  if (std::sscanf(line.c_str(), "# symband n=%zu bandwidth=%zu", &n, &bw) != 2)
    throw std::runtime_error("read_triplets: malformed header");
  SymBandMatrix m(n, bw);
  std::size_t i = 0, j = 0;
  double v = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    if (!(row >> i >> j >> v)) throw std::runtime_error("read_triplets: malformed entry '" + line + "'");
    m.set(i, j, v);
  }
  return m;
}

bool BandCholesky::factor(const SymBandMatrix& a) {
  n_ = a.size();
  bw_ = a.bandwidth();
  l_.assign(n_ * (bw_ + 1), 0.0);
  const auto at = [this](std::size_t i, std::size_t j) -> double& { return l_[i * (bw_ + 1) + (i - j)]; };
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t jlo = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = jlo; j <= i; ++j) {
      double s = a(i, j);
      const std::size_t klo = std::max(jlo, j > bw_ ? j - bw_ : 0);
      for (std::size_t k = klo; k < j; ++k) s -= at(i, k) * at(j, k);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          ok_ = false;
          failed_row_ = i;
          return false;
        }
        at(i, i) = std::sqrt(s);
      } else {
        at(i, j) = s / at(j, j);
      }
    }
  }
  ok_ = true;
  return true;
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
  if (!ok_) throw std::logic_error("BandCholesky::solve without a successful factorization");
  if (b.size() != n_) throw std::invalid_argument("BandCholesky::solve size mismatch");
  const auto at = [this](std::size_t i, std::size_t j) { return l_[i * (bw_ + 1) + (i - j)]; };
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = (i > bw_ ? i - bw_ : 0); k < i; ++k) y[i] -= at(i, k) * y[k];
    y[i] /= at(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    for (std::size_t k = ii + 1; k <= std::min(n_ - 1, ii + bw_); ++k) y[ii] -= at(k, ii) * y[k];
    y[ii] /= at(ii, ii);
  }
  return y;
}

} // namespace wentzell
