#pragma once

#include "wentzell/band_matrix.hpp"
#include "wentzell/coefficient.hpp"
#include "wentzell/hermite.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wentzell {

/// Boundary data of the generalized Wentzell conditions: beta_j > 0, gamma_j <= 0.
struct WentzellParams {
  double beta0 = 1.0;
  double beta1 = 1.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Divergence: A1 u = (a u'')''.  NonDivergence: A2 u = a u''''.
enum class OperatorForm { Divergence, NonDivergence };

std::string to_string(OperatorForm f);

struct AssemblyOptions {
  unsigned threads = 1;
};

enum class GramKind {
  L2,              ///< int phi_i phi_j
  InvAL2,          ///< int phi_i phi_j / a
  H1Semi,          ///< int phi_i' phi_j'
  H2Semi,          ///< int phi_i'' phi_j''
  AWeightedH2Semi, ///< int a phi_i'' phi_j''
};

/// Full-numbering Gram matrix; rows/columns of constrained dofs stay zero.
/// InvAL2 in the strongly degenerate case needs the x0 value dof constrained
/// and otherwise throws DivergentIntegral.
SymBandMatrix gram(const DofMap& map, const DegenerateCoefficient& coeff, GramKind kind,
                   const AssemblyOptions& options = {});

/// Discrete inner-product matrix M, energy matrix K and interior seminorm
/// matrix S, all on the unconstrained dofs (reduced numbering).
struct AssembledSystem {
  OperatorForm form;
  WentzellParams params;
  DegenerateCoefficient coeff;
  DofMap map;
  SymBandMatrix mass;
  SymBandMatrix energy;
  /// int a u'' v'' (Divergence) or int u'' v'' (NonDivergence); K minus boundary terms.
  SymBandMatrix seminorm;

  std::size_t size() const noexcept { return mass.size(); }
  const std::vector<std::size_t>& constrained_dofs() const noexcept { return map.constrained(); }
  DegeneracyClass degeneracy() const { return classify(coeff); }
  std::vector<double> expand(std::span<const double> reduced) const { return map.expand(reduced); }
  std::vector<double> restrict(std::span<const double> full) const { return map.restrict(full); }
};

/// M = int phi phi + sum_j a(j)/beta_j phi(j) phi(j),
/// K = int a phi'' phi'' - sum_j gamma_j a(j)/beta_j phi(j) phi(j).
AssembledSystem assemble_divergence(const DofMap& map, const DegenerateCoefficient& coeff,
                                    const WentzellParams& params, const AssemblyOptions& options = {});

/// M = int phi phi / a + sum_j phi(j) phi(j) / beta_j,
/// K = int phi'' phi'' - sum_j gamma_j/beta_j phi(j) phi(j);
/// strongly degenerate: value dof at x0 constrained to zero.
AssembledSystem assemble_nondivergence(const DofMap& map, const DegenerateCoefficient& coeff,
                                       const WentzellParams& params, const AssemblyOptions& options = {});

AssembledSystem assemble(OperatorForm form, const DofMap& map, const DegenerateCoefficient& coeff,
                         const WentzellParams& params, const AssemblyOptions& options = {});

enum class NormKind {
  L2,              ///< ||u||
  H1Semi,          ///< ||u'||
  H2Semi,          ///< ||u''||
  AWeightedH2Semi, ///< ||sqrt(a) u''||
  InvAL2,          ///< ||u||_{L^2_{1/a}}
  XMu,             ///< L^2 plus boundary masses a(j)/beta_j
  YMu,             ///< L^2_{1/a} plus boundary masses 1/beta_j
  H2a,             ///< ||u||^2 + ||u'||^2 + ||sqrt(a) u''||^2
  TwoA,            ///< ||u||^2 + ||sqrt(a) u''||^2
  H2InvA,          ///< ||u||^2_{1/a} + ||u'||^2 + ||u''||^2
  TwoInvA,         ///< ||u||^2_{1/a} + ||u''||^2
};

/// Norm of a full dof vector by quadrature.  1/a-weighted norms in the
/// strongly degenerate case require u(x0) = 0 and otherwise throw DivergentIntegral.
double norm(std::span<const double> dofs, const DofMap& map, const DegenerateCoefficient& coeff,
            const WentzellParams& params, NormKind kind);

/// ||u_h - u||_{L^2(0,1)} with a 20-point Gauss rule per element.
double l2_error(std::span<const double> dofs, const DofMap& map, const std::function<double(double)>& exact);

} // namespace wentzell
