#include "wentzell/oracle.hpp"

#include "wentzell/errors.hpp"
#include "wentzell/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wentzell {

// ---------------------------------------------------------------------------
// Spectral reference
// ---------------------------------------------------------------------------

Eigen::MatrixXd to_eigen(const SymBandMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

int SpectralDecomposition::kernel_dimension(double rel_tol) const {
  int count = 0;
  for (Eigen::Index i = 0; i < raw_eigenvalues.size(); ++i)
    if (std::abs(raw_eigenvalues[i]) <= rel_tol * scale) ++count;
  return count;
}

namespace {

/// Pencil (A, B) solved after symmetric diagonal scaling by diag(B)^{-1/2};
/// Hermite slope dofs otherwise spread the diagonal of B over many decades.
void scaled_pencil(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::VectorXd& values,
                   Eigen::MatrixXd* vectors) {
  const Eigen::VectorXd d = b.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd as = d.asDiagonal() * a * d.asDiagonal();
  Eigen::MatrixXd bs = d.asDiagonal() * b * d.asDiagonal();
  bs = 0.5 * (bs + bs.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(bs);
  if (llt.info() != Eigen::Success) throw std::runtime_error("mass matrix is not numerically positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (as + as.transpose()), bs, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver did not converge");
  values = es.eigenvalues();
  if (vectors) *vectors = d.asDiagonal() * es.eigenvectors();
}

} // namespace

SpectralDecomposition dense_decompose(const AssembledSystem& system) {
  SpectralDecomposition out;
  out.mass = to_eigen(system.mass);
  out.energy = to_eigen(system.energy);
  scaled_pencil(out.energy, out.mass, out.raw_eigenvalues, &out.eigenvectors);
  out.scale = out.raw_eigenvalues.cwiseAbs().maxCoeff();
  out.eigenvalues = out.raw_eigenvalues;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
    if (std::abs(out.eigenvalues[i]) <= out.clip_tol * out.scale) out.eigenvalues[i] = 0.0;
  return out;
}

std::vector<double> exact_propagator(const SpectralDecomposition& decomp, std::span<const double> u0, double t) {
  if (t < 0.0) throw std::invalid_argument("exact_propagator: t must be >= 0");
  if (static_cast<Eigen::Index>(u0.size()) != decomp.size())
    throw std::invalid_argument("exact_propagator: size mismatch");
  const Eigen::Map<const Eigen::VectorXd> u(u0.data(), decomp.size());
  Eigen::VectorXd coeffs = decomp.eigenvectors.transpose() * (decomp.mass * u);
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::exp(-std::max(decomp.eigenvalues[k], 0.0) * t);
  const Eigen::VectorXd out = decomp.eigenvectors * coeffs;
  return {out.data(), out.data() + out.size()};
}

// ---------------------------------------------------------------------------
// One-sided power series in r = |x - x0|
// ---------------------------------------------------------------------------

namespace {

constexpr double kExponentTol = 1e-12;

/// f(x) = sum c_e r^e on one side of x0, x = x0 + side * r.
struct SideSeries {
  double side = 1.0;
  std::map<double, double> terms; // exponent -> coefficient

  void add(double e, double c) {
    if (c == 0.0) return;
    auto it = terms.lower_bound(e - kExponentTol);
    if (it != terms.end() && std::abs(it->first - e) <= kExponentTol) {
      it->second += c;
      if (it->second == 0.0) terms.erase(it);
    } else {
      terms.emplace(e, c);
    }
  }

  static SideSeries from(const Polynomial& p, double x0, double side) {
    SideSeries s;
    s.side = side;
    const Polynomial q = p.shifted(x0);
    const auto c = q.coeffs();
    double sign = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k, sign *= side) s.add(static_cast<double>(k), sign * c[k]);
    return s;
  }

  /// d/dx = side * d/dr
  SideSeries derivative(int order = 1) const {
    SideSeries out = *this;
    for (int k = 0; k < order; ++k) {
      SideSeries next;
      next.side = side;
      for (const auto& [e, c] : out.terms)
        if (std::abs(e) > kExponentTol) next.add(e - 1.0, side * c * e);
      out = next;
    }
    return out;
  }

  SideSeries weighted(const DegenerateCoefficient& coeff) const {
    SideSeries out;
    out.side = side;
    const double K = coeff.profile() == Profile::PowerLaw ? coeff.exponent() : 0.0;
    for (const auto& [e, c] : terms) out.add(e + K, c * coeff.scale());
    return out;
  }

  SideSeries operator*(const SideSeries& o) const {
    SideSeries out;
    out.side = side;
    for (const auto& [e1, c1] : terms)
      for (const auto& [e2, c2] : o.terms) out.add(e1 + e2, c1 * c2);
    return out;
  }

  double at(double r) const {
    if (r == 0.0) return limit0();
    double acc = 0.0;
    for (const auto& [e, c] : terms) acc += c * std::pow(r, e);
    return acc;
  }

  /// Limit r -> 0+; infinity if a negative power survives.
  double limit0() const {
    double acc = 0.0;
    for (const auto& [e, c] : terms) {
      if (e < -kExponentTol) return std::copysign(std::numeric_limits<double>::infinity(), c);
      if (std::abs(e) <= kExponentTol) acc += c;
    }
    return acc;
  }

  double min_exponent() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [e, c] : terms) m = std::min(m, e);
    return m;
  }

  /// int over r in [r_lo, r_hi] (equals the x-integral over the matching interval).
  double integrate(double r_lo, double r_hi) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms) acc += c * signed_power_integral(0, e, r_lo, r_hi);
    return acc;
  }
};

struct Segment {
  double lo, hi;
  Polynomial poly;
  double side;

  double r_lo(double x0) const { return side > 0 ? lo - x0 : x0 - hi; }
  double r_hi(double x0) const { return side > 0 ? hi - x0 : x0 - lo; }
};

/// Pieces of f split at x0 so that each lies on one side.
std::vector<Segment> segments(const PiecewisePolynomial& f, double x0) {
  if (f.pieces.empty() || f.breaks.size() != f.pieces.size() + 1)
    throw std::invalid_argument("malformed piecewise polynomial");
  std::vector<Segment> out;
  for (std::size_t i = 0; i < f.pieces.size(); ++i) {
    const double lo = f.breaks[i], hi = f.breaks[i + 1];
    if (lo < x0 && hi > x0) {
      out.push_back({lo, x0, f.pieces[i], -1.0});
      out.push_back({x0, hi, f.pieces[i], 1.0});
    } else {
      out.push_back({lo, hi, f.pieces[i], lo >= x0 ? 1.0 : -1.0});
    }
  }
  return out;
}

double rel_tol_for(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool continuous_at(const PiecewisePolynomial& f, double x, int d) {
  if (x <= 0.0 || x >= 1.0) return true;
  const double l = f.eval(x, d, true), r = f.eval(x, d, false);
  return std::abs(l - r) <= rel_tol_for(l, r);
}

std::string name_of(int d) {
  static const char* names[] = {"value", "first derivative", "second derivative", "third derivative"};
  return d >= 0 && d < 4 ? names[d] : "derivative";
}

void require_continuous(const PiecewisePolynomial& f, double x, int up_to, const char* which) {
  for (int d = 0; d <= up_to; ++d) {
    if (!continuous_at(f, x, d)) {
      std::ostringstream msg;
      msg << which << ": " << name_of(d) << " jumps at x = " << x;
      throw MembershipError(msg.str());
    }
  }
}

void require_breaks(const PiecewisePolynomial& f, double x0, const char* which) {
  for (std::size_t i = 1; i + 1 < f.breaks.size(); ++i)
    if (f.breaks[i] != x0) throw MembershipError(std::string(which) + ": pieces may only meet at x0");
}

void require_vanishing(const PiecewisePolynomial& f, double x0, const char* which) {
  const double l = f.eval(x0, 0, true), r = f.eval(x0, 0, false);
  if (std::abs(l) > 1e-12 || std::abs(r) > 1e-12)
    throw MembershipError(std::string(which) + ": must vanish at x0");
}

/// (a u'')'' in L^2 and (a u'')' continuous across an interior x0.
void require_weighted_h2(const std::vector<Segment>& segs, const DegenerateCoefficient& coeff, double x0) {
  double left_flux = std::numeric_limits<double>::quiet_NaN(), right_flux = left_flux;
  for (const Segment& s : segs) {
    const SideSeries w = SideSeries::from(s.poly, x0, s.side).derivative(2).weighted(coeff);
    const SideSeries w2 = w.derivative(2);
    const bool touches = s.r_lo(x0) == 0.0;
    if (touches && w2.min_exponent() <= -0.5 + kExponentTol)
      throw MembershipError("u: (a u'')'' is not square integrable near x0");
    if (touches) (s.side < 0 ? left_flux : right_flux) = w.derivative(1).limit0();
  }
  if (!std::isnan(left_flux) && !std::isnan(right_flux)) {
    if (!std::isfinite(left_flux) || !std::isfinite(right_flux) ||
        std::abs(left_flux - right_flux) > rel_tol_for(left_flux, right_flux))
      throw MembershipError("u: (a u'')' is not continuous at x0");
  }
}

double eval_series_at(const std::vector<Segment>& segs, double x0, double x,
                      const std::function<SideSeries(const SideSeries&)>& build) {
  for (const Segment& s : segs) {
    if (x < s.lo || x > s.hi) continue;
    const SideSeries base = SideSeries::from(s.poly, x0, s.side);
    return build(base).at(std::abs(x - x0));
  }
  throw std::logic_error("point outside the partition");
}

} // namespace

// ---------------------------------------------------------------------------
// Green identities
// ---------------------------------------------------------------------------

GreenReport green_residual(OperatorForm form, const DegenerateCoefficient& coeff, const PiecewisePolynomial& u,
                           const PiecewisePolynomial& v) {
  if (!coeff.has_closed_form()) throw std::invalid_argument("green_residual needs a closed-form coefficient");
  const double x0 = coeff.x0();
  const DegeneracyClass cls = classify(coeff);
  const bool interior = x0 > 0.0 && x0 < 1.0;
  require_breaks(u, x0, "u");
  require_breaks(v, x0, "v");

  if (form == OperatorForm::Divergence) {
    if (cls == DegeneracyClass::Strong) {
      require_continuous(u, x0, 0, "u");
      require_continuous(v, x0, 0, "v");
    } else if (cls == DegeneracyClass::Weak) {
      require_continuous(u, x0, 1, "u");
      require_continuous(v, x0, 1, "v");
    } else {
      require_continuous(u, x0, 3, "u");
      require_continuous(v, x0, 1, "v");
    }
  } else {
    if (cls == DegeneracyClass::Strong) {
      if (coeff.exponent() >= 2.0) throw HypothesisViolation("non-divergence Green identity needs K in [1,2)");
      require_continuous(u, x0, 1, "u");
      require_continuous(v, x0, 1, "v");
      require_vanishing(u, x0, "u");
      require_vanishing(v, x0, "v");
    } else {
      require_continuous(u, x0, 3, "u");
      require_continuous(v, x0, 1, "v");
    }
  }

  const auto us = segments(u, x0);
  const auto vs = segments(v, x0);
  if (form == OperatorForm::Divergence) require_weighted_h2(us, coeff, x0);

  // Flux F = (a u'')' and moment W = a u'' (divergence) or u''' and u'' (non-divergence).
  const auto moment = [&](const SideSeries& s) {
    return form == OperatorForm::Divergence ? s.derivative(2).weighted(coeff) : s.derivative(2);
  };
  const auto flux = [&](const SideSeries& s) { return moment(s).derivative(1); };

  GreenReport rep;
  for (const Segment& s : us) {
    // Pair each u segment with the v segment on the same interval.
    const Segment* vseg = nullptr;
    for (const Segment& t : vs)
      if (t.lo <= s.lo && t.hi >= s.hi && t.side == s.side) vseg = &t;
    if (!vseg) throw std::logic_error("mismatched partitions");
    // Restrict both to the common interval [s.lo, s.hi].
    const SideSeries U = SideSeries::from(s.poly, x0, s.side);
    const SideSeries V = SideSeries::from(vseg->poly, x0, s.side);
    const double r0 = s.r_lo(x0), r1 = s.r_hi(x0);
    rep.lhs += (flux(U).derivative(1) * V).integrate(r0, r1);
    rep.rhs += (moment(U) * V.derivative(2)).integrate(r0, r1);
  }

  const auto boundary_value = [&](double x) {
    const double fv = eval_series_at(us, x0, x, flux) * eval_series_at(vs, x0, x, [](const SideSeries& s) { return s; });
    const double mv = eval_series_at(us, x0, x, moment) *
                      eval_series_at(vs, x0, x, [](const SideSeries& s) { return s.derivative(1); });
    return std::pair{fv, mv};
  };
  const auto [f1, m1] = boundary_value(1.0);
  const auto [f0, m0] = boundary_value(0.0);
  double flux_part = f1 - f0;
  if (form == OperatorForm::NonDivergence && cls == DegeneracyClass::Strong) {
    if (x0 == 0.0) flux_part = f1;
    if (x0 == 1.0) flux_part = -f0;
  }
  rep.boundary = flux_part - (m1 - m0);

  if (form == OperatorForm::NonDivergence && cls == DegeneracyClass::Strong && interior) {
    const double plus = u.eval(x0, 2, false) * v.eval(x0, 1, false);
    const double minus = u.eval(x0, 2, true) * v.eval(x0, 1, true);
    rep.jump = plus - minus;
  }

  rep.residual = std::abs(rep.lhs - (rep.boundary + rep.jump + rep.rhs));
  rep.residual_without_jump = std::abs(rep.lhs - (rep.boundary + rep.rhs));
  rep.scale = std::max({std::abs(rep.lhs), std::abs(rep.boundary), std::abs(rep.jump), std::abs(rep.rhs)});
  return rep;
}

// ---------------------------------------------------------------------------
// Inequalities
// ---------------------------------------------------------------------------

HardyPieces hardy_bound(const DegenerateCoefficient& coeff, double y0) {
  if (coeff.profile() != Profile::PowerLaw) throw std::invalid_argument("hardy_bound needs a power-law coefficient");
  if (!(y0 > 0.0 && y0 < 1.0)) throw std::invalid_argument("y0 must lie in (0,1)");
  const double x0 = coeff.x0(), K = coeff.exponent(), c = coeff.scale();
  if (K >= 2.0) throw DivergentIntegral("hardy_bound: left piece diverges for K >= 2");
  if (y0 == x0) throw std::invalid_argument("y0 must differ from x0");
  const double s0 = std::abs(y0 - x0);
  const double L = y0 > x0 ? 1.0 - x0 : x0;
  HardyPieces out;
  out.left = signed_power_integral(1, -K, 0.0, s0) / c;
  out.right = (L * signed_power_integral(0, -K, s0, L) - signed_power_integral(1, -K, s0, L)) / c;
  out.left_bound = std::pow(s0, 2.0 - K) / ((2.0 - K) * c);
  return out;
}

LinearFit best_linear_fit(const Polynomial& u) {
  const Polynomial p = u.shifted(0.0);
  const auto c = p.coeffs();
  long double i0 = 0.0L, i1 = 0.0L;
  for (std::size_t k = 0; k < c.size(); ++k) {
    i0 += static_cast<long double>(c[k]) / static_cast<long double>(k + 1);
    i1 += static_cast<long double>(c[k]) / static_cast<long double>(k + 2);
  }
  // Normal equations for {1, x} on (0,1): [1 1/2; 1/2 1/3] [q; m] = [i0; i1].
  const long double q = 4.0L * i0 - 6.0L * i1;
  const long double m = -6.0L * i0 + 12.0L * i1;
  LinearFit fit;
  fit.intercept = static_cast<double>(q);
  fit.slope = static_cast<double>(m);
  fit.orthogonality_1 = static_cast<double>(i0 - (q + m / 2.0L));
  fit.orthogonality_x = static_cast<double>(i1 - (q / 2.0L + m / 3.0L));

  const auto r = [&](double x) { return p(x) - (fit.slope * x + fit.intercept); };
  constexpr int kGrid = 1000000;
  double prev_x = 0.0, prev_v = 0.0;
  bool have_prev = false;
  for (int i = 1; i < kGrid; ++i) {
    const double x = static_cast<double>(i) / kGrid;
    const double v = r(x);
    if (v == 0.0) continue;
    if (have_prev && std::signbit(v) != std::signbit(prev_v)) {
      double lo = prev_x, hi = x, flo = prev_v;
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi), fm = r(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (std::signbit(fm) == std::signbit(flo)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      fit.sign_changes.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_v = v;
    have_prev = true;
  }
  return fit;
}

double pointwise_sqrt_bound(const PiecewisePolynomial& u, const DegenerateCoefficient& coeff, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("pointwise_sqrt_bound: k must be 0, 1 or 2");
  if (!coeff.has_closed_form()) throw std::invalid_argument("pointwise_sqrt_bound needs a closed-form coefficient");
  const double x0 = coeff.x0();
  for (std::size_t i = 1; i + 1 < u.breaks.size(); ++i) {
    const double b = u.breaks[i];
    require_continuous(u, b, 0, "u");
    if (b != x0)
      for (int d = 1; d <= k; ++d) require_continuous(u, b, d, "u");
  }
  const auto segs = segments(u, x0);
  double norm_sq = 0.0;
  for (const Segment& s : segs) {
    const SideSeries flux = SideSeries::from(s.poly, x0, s.side).derivative(k).weighted(coeff).derivative(1);
    norm_sq += (flux * flux).integrate(s.r_lo(x0), s.r_hi(x0));
  }
  if (!(norm_sq > 0.0)) return 0.0;
  const double norm = std::sqrt(norm_sq);
  double worst = 0.0;
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = static_cast<double>(i) / kSamples;
    const double dist = std::abs(x - x0);
    const double lhs = std::abs(coeff(x) * u.eval(x, k));
    const double rhs = norm * std::sqrt(dist);
    if (rhs == 0.0) continue;
    worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

EquivalenceReport norm_equivalence_report(const DofMap& map, const DegenerateCoefficient& coeff,
                                          std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 100) throw std::invalid_argument("norm_equivalence_report: need at least 100 samples");
  EquivalenceReport rep;
  rep.samples = sample_count;
  rep.seed = seed;
  const Mesh& base = map.mesh();
  for (int level = 0; level < 3; ++level) {
    const std::size_t n = base.element_count() << level;
    const DofMap m = hermite_basis(build_mesh(n, base.x0(), base.grading()));
    const Eigen::MatrixXd g0 = to_eigen(gram(m, coeff, GramKind::L2));
    const Eigen::MatrixXd g1 = to_eigen(gram(m, coeff, GramKind::H1Semi));
    const Eigen::MatrixXd g2 = to_eigen(gram(m, coeff, GramKind::AWeightedH2Semi));
    const Eigen::MatrixXd denom = g0 + g2;

    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(level));
    std::normal_distribution<double> normal(0.0, 1.0);
    EquivalenceLevel lv;
    lv.elements = n;
    Eigen::VectorXd z(g0.rows());
    for (std::size_t s = 0; s < sample_count; ++s) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
      const double num = z.dot(g1 * z), den = z.dot(denom * z);
      if (den > 0.0) lv.max_ratio = std::max(lv.max_ratio, num / den);
    }
    Eigen::VectorXd values;
    scaled_pencil(g1, denom, values, nullptr);
    lv.discrete_sup = values.maxCoeff();
    rep.levels.push_back(lv);
  }
  for (std::size_t i = 0; i + 1 < rep.levels.size(); ++i)
    rep.growth.push_back(rep.levels[i + 1].max_ratio / rep.levels[i].max_ratio);
  return rep;
}

} // namespace wentzell
