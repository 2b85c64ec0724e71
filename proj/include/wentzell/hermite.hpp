#pragma once

#include "wentzell/mesh.hpp"
#include "wentzell/polynomial.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace wentzell {

/// Cubic Hermite shape functions on [xl, xr]: local dofs
/// 0 = value at xl, 1 = slope at xl, 2 = value at xr, 3 = slope at xr.
/// Returns the d-th derivative (d = 0..3) of all four at x.
std::array<double, 4> hermite_shape(double xl, double xr, double x, int d);

/// Global numbering of the C1 piecewise-cubic space: node i carries value
/// dof 2i and slope dof 2i+1.  Owns a copy of its mesh.
class DofMap {
public:
  explicit DofMap(Mesh mesh, std::vector<std::size_t> constrained = {});

  const Mesh& mesh() const noexcept { return mesh_; }
  std::size_t total_dofs() const noexcept { return 2 * mesh_.node_count(); }
  static std::size_t value_dof(std::size_t node) noexcept { return 2 * node; }
  static std::size_t slope_dof(std::size_t node) noexcept { return 2 * node + 1; }
  std::array<std::size_t, 4> element_dofs(std::size_t e) const noexcept {
    return {2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3};
  }

  /// Sorted dof indices pinned to zero.
  const std::vector<std::size_t>& constrained() const noexcept { return constrained_; }
  bool is_constrained(std::size_t dof) const noexcept;
  /// Unconstrained dofs in increasing order (reduced numbering = position).
  const std::vector<std::size_t>& free_dofs() const noexcept { return free_; }

  DofMap with_constraint(std::size_t dof) const;

  /// Scatter a reduced vector into the full numbering (constrained dofs = 0).
  std::vector<double> expand(std::span<const double> reduced) const;
  std::vector<double> restrict(std::span<const double> full) const;

private:
  Mesh mesh_;
  std::vector<std::size_t> constrained_;
  std::vector<std::size_t> free_;
};

/// Standard Hermite basis on the mesh, no constraints.
DofMap hermite_basis(const Mesh& mesh);

/// d-th derivative (0..3) of the represented function at x; one-sided from
/// the right element at interior nodes (from the left at x = 1).
double evaluate(std::span<const double> dofs, const DofMap& map, double x, int d);

/// Nodal Hermite interpolant from value and slope callables.
std::vector<double> interpolate(const DofMap& map, const std::function<double(double)>& value,
                                const std::function<double(double)>& slope);
std::vector<double> interpolate(const DofMap& map, const Polynomial& p);

/// Element-wise cubic pieces of a full dof vector.
PiecewisePolynomial to_piecewise(std::span<const double> dofs, const DofMap& map);

} // namespace wentzell
