#include "wentzell/forms.hpp"

#include "wentzell/errors.hpp"
#include "wentzell/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wentzell {

void WentzellParams::validate() const {
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
  if (!(beta1 > 0.0)) throw std::invalid_argument("beta1 must be > 0");
  if (!(gamma0 <= 0.0)) throw std::invalid_argument("gamma0 must be <= 0");
  if (!(gamma1 <= 0.0)) throw std::invalid_argument("gamma1 must be <= 0");
}

std::string to_string(OperatorForm f) {
  return f == OperatorForm::Divergence ? "divergence" : "nondivergence";
}

namespace {

using LocalMatrix = std::array<double, 16>;

struct GramSpec {
  WeightKind weight;
  int derivative;
};

GramSpec spec_for(GramKind kind) {
  switch (kind) {
  case GramKind::L2: return {WeightKind::Unit, 0};
  case GramKind::InvAL2: return {WeightKind::CoeffReciprocalA, 0};
  case GramKind::H1Semi: return {WeightKind::Unit, 1};
  case GramKind::H2Semi: return {WeightKind::Unit, 2};
  case GramKind::AWeightedH2Semi: return {WeightKind::CoeffA, 2};
  }
  throw std::invalid_argument("unknown GramKind");
}

SingularConvention convention_for(const DofMap& map) {
  const std::size_t x0_value = DofMap::value_dof(map.mesh().x0_index());
  return map.is_constrained(x0_value) ? SingularConvention::ConstrainedFactor : SingularConvention::Plain;
}

LocalMatrix element_matrix(const Mesh& mesh, const ElementRule& r, std::size_t e, int d, double x0,
                           const std::array<bool, 4>& active) {
  LocalMatrix m{};
  const double xl = mesh.left(e), xr = mesh.right(e);
  for (std::size_t q = 0; q < r.points.size(); ++q) {
    const double x = r.points[q];
    const auto phi = hermite_shape(xl, xr, x, d);
    double w = r.weights[q];
    if (r.divisor_power != 0) w /= std::pow(x - x0, r.divisor_power);
    for (int i = 0; i < 4; ++i) {
      if (!active[i]) continue;
      for (int j = 0; j <= i; ++j)
        if (active[j]) m[4 * i + j] += w * phi[i] * phi[j];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) m[4 * i + j] = m[4 * j + i];
  return m;
}

} // namespace

SymBandMatrix gram(const DofMap& map, const DegenerateCoefficient& coeff, GramKind kind,
                   const AssemblyOptions& options) {
  const GramSpec spec = spec_for(kind);
  const QuadratureRule rule = weighted_rule(map, coeff, spec.weight, convention_for(map));
  const Mesh& mesh = map.mesh();
  const std::size_t ne = mesh.element_count();

  std::vector<LocalMatrix> local(ne);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const auto ids = map.element_dofs(e);
      std::array<bool, 4> active{};
      for (int k = 0; k < 4; ++k) active[k] = !map.is_constrained(ids[k]);
      local[e] = element_matrix(mesh, rule.elements[e], e, spec.derivative, rule.x0, active);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(ne)));
  if (threads == 1) {
    work(0, ne);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (ne + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, en = std::min(ne, b + chunk);
      if (b < en) pool.emplace_back(work, b, en);
    }
  }

  // Fixed element order keeps the reduction bit-identical across thread counts.
  SymBandMatrix g(map.total_dofs(), 3);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto ids = map.element_dofs(e);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) g.add(ids[i], ids[j], local[e][4 * i + j]);
  }
  return g;
}

namespace {

void require_interior(const DofMap& map) {
  const double x0 = map.mesh().x0();
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::invalid_argument("evolution operators need the degeneracy point strictly inside (0,1)");
}

void require_hypothesis(const DegenerateCoefficient& coeff) {
  if (classify(coeff) != DegeneracyClass::Strong) return;
  const HypothesisReport rep = check_hypothesis(coeff, coeff.exponent());
  if (!rep) throw HypothesisViolation("strongly degenerate coefficient: " + rep.reason);
}

AssembledSystem finish(OperatorForm form, const DofMap& map, const DegenerateCoefficient& coeff,
                       const WentzellParams& params, const SymBandMatrix& mass_full,
                       const SymBandMatrix& semi_full, double boundary_mass0, double boundary_mass1,
                       double boundary_energy0, double boundary_energy1) {
  SymBandMatrix mass = mass_full;
  SymBandMatrix energy = semi_full;
  const std::size_t first = DofMap::value_dof(0);
  const std::size_t last = DofMap::value_dof(map.mesh().node_count() - 1);
  mass.add(first, first, boundary_mass0);
  mass.add(last, last, boundary_mass1);
  energy.add(first, first, boundary_energy0);
  energy.add(last, last, boundary_energy1);
  const auto& keep = map.free_dofs();
  return AssembledSystem{form,
                         params,
                         coeff,
                         map,
                         mass.submatrix(keep),
                         energy.submatrix(keep),
                         semi_full.submatrix(keep)};
}

} // namespace

AssembledSystem assemble_divergence(const DofMap& map_in, const DegenerateCoefficient& coeff,
                                    const WentzellParams& params, const AssemblyOptions& options) {
  params.validate();
  require_interior(map_in);
  require_hypothesis(coeff);
  const DofMap map(map_in.mesh());
  const SymBandMatrix mass = gram(map, coeff, GramKind::L2, options);
  const SymBandMatrix semi = gram(map, coeff, GramKind::AWeightedH2Semi, options);
  const double c0 = coeff(0.0) / params.beta0, c1 = coeff(1.0) / params.beta1;
  return finish(OperatorForm::Divergence, map, coeff, params, mass, semi, c0, c1, -params.gamma0 * c0,
                -params.gamma1 * c1);
}

AssembledSystem assemble_nondivergence(const DofMap& map_in, const DegenerateCoefficient& coeff,
                                       const WentzellParams& params, const AssemblyOptions& options) {
  params.validate();
  require_interior(map_in);
  const DegeneracyClass cls = classify(coeff);
  if (cls == DegeneracyClass::Strong && coeff.exponent() >= 2.0)
    throw HypothesisViolation("non-divergence form needs K in [1,2) in the strongly degenerate case");
  require_hypothesis(coeff);
  DofMap map(map_in.mesh());
  if (cls == DegeneracyClass::Strong) map = map.with_constraint(DofMap::value_dof(map.mesh().x0_index()));
  const SymBandMatrix mass = gram(map, coeff, GramKind::InvAL2, options);
  const SymBandMatrix semi = gram(map, coeff, GramKind::H2Semi, options);
  const double c0 = 1.0 / params.beta0, c1 = 1.0 / params.beta1;
  return finish(OperatorForm::NonDivergence, map, coeff, params, mass, semi, c0, c1, -params.gamma0 * c0,
                -params.gamma1 * c1);
}

AssembledSystem assemble(OperatorForm form, const DofMap& map, const DegenerateCoefficient& coeff,
                         const WentzellParams& params, const AssemblyOptions& options) {
  return form == OperatorForm::Divergence ? assemble_divergence(map, coeff, params, options)
                                          : assemble_nondivergence(map, coeff, params, options);
}

namespace {

double squared_integral(std::span<const double> dofs, const DofMap& map, const QuadratureRule& rule, int d) {
  const Mesh& mesh = map.mesh();
  double acc = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto ids = map.element_dofs(e);
    const ElementRule& r = rule.elements[e];
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      const auto phi = hermite_shape(mesh.left(e), mesh.right(e), r.points[q], d);
      double u = 0.0;
      for (int k = 0; k < 4; ++k) u += phi[k] * dofs[ids[k]];
      double w = r.weights[q];
      if (r.divisor_power != 0) w /= std::pow(r.points[q] - rule.x0, r.divisor_power);
      acc += w * u * u;
    }
  }
  return acc;
}

double inv_a_l2_sq(std::span<const double> dofs, const DofMap& map, const DegenerateCoefficient& coeff) {
  SingularConvention conv = SingularConvention::Plain;
  if (classify(coeff) == DegeneracyClass::Strong) {
    if (dofs[DofMap::value_dof(map.mesh().x0_index())] != 0.0)
      throw DivergentIntegral("||u||_{L^2_{1/a}} is infinite unless u(x0) = 0 (strong degeneracy)");
    conv = SingularConvention::ConstrainedFactor;
  }
  return squared_integral(dofs, map, weighted_rule(map, coeff, WeightKind::CoeffReciprocalA, conv), 0);
}

} // namespace

double norm(std::span<const double> dofs, const DofMap& map, const DegenerateCoefficient& coeff,
            const WentzellParams& params, NormKind kind) {
  if (dofs.size() != map.total_dofs()) throw std::invalid_argument("norm: dof vector size mismatch");
  const auto unit = [&](int d) {
    return squared_integral(dofs, map, weighted_rule(map, coeff, WeightKind::Unit), d);
  };
  const auto weighted_h2 = [&] {
    return squared_integral(dofs, map, weighted_rule(map, coeff, WeightKind::CoeffA), 2);
  };
  const double u0 = dofs[DofMap::value_dof(0)];
  const double u1 = dofs[DofMap::value_dof(map.mesh().node_count() - 1)];
  double sq = 0.0;
  switch (kind) {
  case NormKind::L2: sq = unit(0); break;
  case NormKind::H1Semi: sq = unit(1); break;
  case NormKind::H2Semi: sq = unit(2); break;
  case NormKind::AWeightedH2Semi: sq = weighted_h2(); break;
  case NormKind::InvAL2: sq = inv_a_l2_sq(dofs, map, coeff); break;
  case NormKind::XMu:
    sq = unit(0) + coeff(0.0) * u0 * u0 / params.beta0 + coeff(1.0) * u1 * u1 / params.beta1;
    break;
  case NormKind::YMu:
    sq = inv_a_l2_sq(dofs, map, coeff) + u0 * u0 / params.beta0 + u1 * u1 / params.beta1;
    break;
  case NormKind::H2a: sq = unit(0) + unit(1) + weighted_h2(); break;
  case NormKind::TwoA: sq = unit(0) + weighted_h2(); break;
  case NormKind::H2InvA: sq = inv_a_l2_sq(dofs, map, coeff) + unit(1) + unit(2); break;
  case NormKind::TwoInvA: sq = inv_a_l2_sq(dofs, map, coeff) + unit(2); break;
  }
  return std::sqrt(std::max(sq, 0.0));
}

double l2_error(std::span<const double> dofs, const DofMap& map, const std::function<double(double)>& exact) {
  const Mesh& mesh = map.mesh();
  const GaussRule g = gauss_legendre(20);
  double acc = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double xl = mesh.left(e), xr = mesh.right(e);
    const double mid = 0.5 * (xl + xr), half = 0.5 * (xr - xl);
    const auto ids = map.element_dofs(e);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double x = mid + half * g.nodes[q];
      const auto phi = hermite_shape(xl, xr, x, 0);
      double u = 0.0;
      for (int k = 0; k < 4; ++k) u += phi[k] * dofs[ids[k]];
      const double diff = u - exact(x);
      acc += g.weights[q] * half * diff * diff;
    }
  }
  return std::sqrt(acc);
}

} // namespace wentzell
