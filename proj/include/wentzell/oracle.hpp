#pragma once

#include "wentzell/forms.hpp"
#include "wentzell/polynomial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wentzell {

// ---------------------------------------------------------------------------
// Dense spectral reference
// ---------------------------------------------------------------------------

/// Generalized eigenpairs of K x = lambda M x on the free dofs.
struct SpectralDecomposition {
  Eigen::VectorXd raw_eigenvalues; ///< ascending, as computed
  Eigen::VectorXd eigenvalues;     ///< raw values with |lambda| <= clip_tol * scale set to 0
  Eigen::MatrixXd eigenvectors;    ///< columns, M-orthonormal
  Eigen::MatrixXd mass;
  Eigen::MatrixXd energy;
  double scale = 0.0; ///< max |raw eigenvalue|
  double clip_tol = 1e-10;

  Eigen::Index size() const { return eigenvalues.size(); }
  double min_raw() const { return raw_eigenvalues.minCoeff(); }
  /// Eigenvalues with |lambda| <= rel_tol * scale.
  int kernel_dimension(double rel_tol = 1e-9) const;
};

Eigen::MatrixXd to_eigen(const SymBandMatrix& m);

/// Throws std::runtime_error when M is not numerically positive definite.
SpectralDecomposition dense_decompose(const AssembledSystem& system);

/// sum_k exp(-lambda_k t) <u0, v_k>_M v_k.
std::vector<double> exact_propagator(const SpectralDecomposition& decomp, std::span<const double> u0, double t);

// ---------------------------------------------------------------------------
// Green identities
// ---------------------------------------------------------------------------

/// lhs = int A u v, boundary = the [.]_{0}^{1} terms, jump = interior term at x0,
/// rhs = the second-order integral.
struct GreenReport {
  double lhs = 0.0;
  double boundary = 0.0;
  double jump = 0.0;
  double rhs = 0.0;
  double residual = 0.0;              ///< |lhs - (boundary + jump + rhs)|
  double residual_without_jump = 0.0; ///< |lhs - (boundary + rhs)|
  double scale = 0.0;                 ///< largest of |lhs|, |boundary|, |jump|, |rhs|
};

/// u and v are given as pieces on each side of the coefficient's x0
/// (PiecewisePolynomial::two_sided, or single for x0 in {0,1}).  Checks the
/// membership conditions of the relevant pair of spaces and throws
/// MembershipError if they fail.  All integrals are exact.
GreenReport green_residual(OperatorForm form, const DegenerateCoefficient& coeff, const PiecewisePolynomial& u,
                           const PiecewisePolynomial& v);

// ---------------------------------------------------------------------------
// Inequalities
// ---------------------------------------------------------------------------

/// Pieces of the integral split used for the strongly degenerate norm
/// equivalence, in the frame s = |x - x0| on the side containing y0:
///   left  = int_0^s0 (int_s^s0 1/a) ds = int_0^s0 r/a(r) dr
///   right = int_s0^L (int_s0^s 1/a) ds = int_s0^L (L - r)/a(r) dr
/// with s0 = |y0 - x0| and L the distance from x0 to the boundary on that side.
struct HardyPieces {
  double left = 0.0;
  double right = 0.0;
  /// s0^{2-K} / ((2-K) scale): equality case of the left-piece estimate.
  double left_bound = 0.0;
};

/// PowerLaw only.  DivergentIntegral for K >= 2.
HardyPieces hardy_bound(const DegenerateCoefficient& coeff, double y0);

struct LinearFit {
  double slope = 0.0;     ///< p1(x) = slope * x + intercept
  double intercept = 0.0;
  std::vector<double> sign_changes; ///< zeros of u - p1 in (0,1) where the sign flips
  double orthogonality_1 = 0.0;     ///< int (u - p1)
  double orthogonality_x = 0.0;     ///< int x (u - p1)
};

/// L^2(0,1) best affine approximation and the sign changes of the residual
/// (1e-6 sampling grid, bisection refinement).
LinearFit best_linear_fit(const Polynomial& u);

/// max over a 2001-point grid of |a u^(k)| / (||(a u^(k))'||_{L^2} sqrt|x - x0|).
/// u must be continuous, and for k >= 1 u^(k) continuous away from x0.
/// Returns 0 when the norm vanishes.
double pointwise_sqrt_bound(const PiecewisePolynomial& u, const DegenerateCoefficient& coeff, int k);

struct EquivalenceLevel {
  std::size_t elements = 0;
  double max_ratio = 0.0;    ///< over the random samples
  double discrete_sup = 0.0; ///< largest eigenvalue of the ratio's pencil
};

/// ||u'||^2 / (||u||^2 + ||sqrt(a) u''||^2) over random dof vectors on the
/// given mesh and two uniform refinements of its element count.
struct EquivalenceReport {
  std::vector<EquivalenceLevel> levels;
  std::vector<double> growth; ///< max_ratio[i+1] / max_ratio[i]
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

EquivalenceReport norm_equivalence_report(const DofMap& map, const DegenerateCoefficient& coeff,
                                          std::size_t sample_count, std::uint64_t seed = 20240601);

} // namespace wentzell
