#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace wentzell {

/// Symmetric matrix stored as its lower band: entry (i, j) with
/// 0 <= i - j <= bandwidth.  Symmetry holds by construction.  Entries are
/// accumulated in long double; the double values are their roundings, and
/// the extended products and forms use the unrounded sums.
class SymBandMatrix {
public:
  SymBandMatrix() = default;
  SymBandMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  /// Either triangle; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  /// Adds v to (i,j) (and implicitly (j,i)); i,j must be inside the band.
  void add(std::size_t i, std::size_t j, double v);
  void set(std::size_t i, std::size_t j, double v);

  std::vector<double> multiply(std::span<const double> x) const;
  /// Product accumulated in long double, for residuals in iterative refinement.
  std::vector<long double> multiply_extended(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
  double bilinear_form(std::span<const double> x, std::span<const double> y) const;

  /// alpha * this + beta * other (same size; band is the wider one).
  SymBandMatrix combined(double alpha, const SymBandMatrix& other, double beta) const;

  /// Principal submatrix on the given (sorted) indices.
  SymBandMatrix submatrix(std::span<const std::size_t> keep) const;

  /// Row-major dense copy with both triangles filled.
  std::vector<double> to_dense() const;
  double max_abs() const;

  /// Text export: header "# symband n=<n> bandwidth=<bw>" then one line
  /// "row col value" per stored entry with row >= col, sorted by row then
  /// column, values with 17 significant digits.
  void write_triplets(std::ostream& os) const;
  static SymBandMatrix read_triplets(std::istream& is);

private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * (bw_ + 1) + (i - j); }

  long double extended_at(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> lower_;
  std::vector<long double> extended_;
};

/// Banded Cholesky factorization A = L L^T.
class BandCholesky {
public:
  /// Returns false when a pivot is not strictly positive.
  bool factor(const SymBandMatrix& a);
  bool ok() const noexcept { return ok_; }
  /// Row of the first failed pivot (valid when !ok()).
  std::size_t failed_row() const noexcept { return failed_row_; }
  std::vector<double> solve(std::span<const double> b) const;

private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> l_; // same layout as SymBandMatrix lower storage
  bool ok_ = false;
  std::size_t failed_row_ = 0;
};

} // namespace wentzell
