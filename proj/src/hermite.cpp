#include "wentzell/hermite.hpp"

#include <algorithm>
#include <stdexcept>

namespace wentzell {

std::array<double, 4> hermite_shape(double xl, double xr, double x, int d) {
  const double h = xr - xl;
  const double s = (x - xl) / h;
  const double r = 1.0 - s; // factored forms keep relative accuracy near both ends
  switch (d) {
  case 0:
    return {r * r * (1.0 + 2.0 * s), h * s * r * r, s * s * (3.0 - 2.0 * s), -h * s * s * r};
  case 1:
    return {-6.0 * s * r / h, r * (1.0 - 3.0 * s), 6.0 * s * r / h, s * (3.0 * s - 2.0)};
  case 2:
    return {(12.0 * s - 6.0) / (h * h), (6.0 * s - 4.0) / h, (6.0 - 12.0 * s) / (h * h),
            (6.0 * s - 2.0) / h};
  case 3:
    return {12.0 / (h * h * h), 6.0 / (h * h), -12.0 / (h * h * h), 6.0 / (h * h)};
  default: throw std::invalid_argument("hermite_shape: derivative order must be 0..3");
  }
}

DofMap::DofMap(Mesh mesh, std::vector<std::size_t> constrained)
    : mesh_(std::move(mesh)), constrained_(std::move(constrained)) {
  std::sort(constrained_.begin(), constrained_.end());
  constrained_.erase(std::unique(constrained_.begin(), constrained_.end()), constrained_.end());
  for (std::size_t c : constrained_)
    if (c >= total_dofs()) throw std::invalid_argument("constrained dof out of range");
  free_.reserve(total_dofs() - constrained_.size());
  for (std::size_t i = 0; i < total_dofs(); ++i)
    if (!is_constrained(i)) free_.push_back(i);
}

bool DofMap::is_constrained(std::size_t dof) const noexcept {
  return std::binary_search(constrained_.begin(), constrained_.end(), dof);
}

DofMap DofMap::with_constraint(std::size_t dof) const {
  auto c = constrained_;
  c.push_back(dof);
  return DofMap(mesh_, std::move(c));
}

std::vector<double> DofMap::expand(std::span<const double> reduced) const {
  if (reduced.size() != free_.size()) throw std::invalid_argument("expand: size mismatch");
  std::vector<double> full(total_dofs(), 0.0);
  for (std::size_t i = 0; i < free_.size(); ++i) full[free_[i]] = reduced[i];
  return full;
}

std::vector<double> DofMap::restrict(std::span<const double> full) const {
  if (full.size() != total_dofs()) throw std::invalid_argument("restrict: size mismatch");
  std::vector<double> reduced(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i) reduced[i] = full[free_[i]];
  return reduced;
}

DofMap hermite_basis(const Mesh& mesh) { return DofMap(mesh); }

double evaluate(std::span<const double> dofs, const DofMap& map, double x, int d) {
  if (d < 0 || d > 3) throw std::invalid_argument("evaluate: derivative order must be 0..3");
  if (dofs.size() != map.total_dofs()) throw std::invalid_argument("evaluate: dof vector size mismatch");
  const Mesh& mesh = map.mesh();
  const std::size_t e = mesh.locate(x);
  const auto shape = hermite_shape(mesh.left(e), mesh.right(e), x, d);
  const auto ids = map.element_dofs(e);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += shape[k] * dofs[ids[k]];
  return acc;
}

std::vector<double> interpolate(const DofMap& map, const std::function<double(double)>& value,
                                const std::function<double(double)>& slope) {
  std::vector<double> dofs(map.total_dofs(), 0.0);
  const auto& nodes = map.mesh().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    dofs[DofMap::value_dof(i)] = value(nodes[i]);
    dofs[DofMap::slope_dof(i)] = slope(nodes[i]);
  }
  for (std::size_t c : map.constrained()) dofs[c] = 0.0;
  return dofs;
}

std::vector<double> interpolate(const DofMap& map, const Polynomial& p) {
  const Polynomial dp = p.derivative();
  return interpolate(map, [&p](double x) { return p(x); }, [&dp](double x) { return dp(x); });
}

PiecewisePolynomial to_piecewise(std::span<const double> dofs, const DofMap& map) {
  if (dofs.size() != map.total_dofs()) throw std::invalid_argument("to_piecewise: size mismatch");
  const Mesh& mesh = map.mesh();
  PiecewisePolynomial out;
  out.breaks = mesh.nodes();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double xl = mesh.left(e), h = mesh.length(e);
    const auto ids = map.element_dofs(e);
    const double u0 = dofs[ids[0]], d0 = dofs[ids[1]], u1 = dofs[ids[2]], d1 = dofs[ids[3]];
    // Cubic in t = x - xl matching value/slope at both ends.
    const double c2 = (3.0 * (u1 - u0) / h - 2.0 * d0 - d1) / h;
    const double c3 = (2.0 * (u0 - u1) / h + d0 + d1) / (h * h);
    out.pieces.emplace_back(std::vector<double>{u0, d0, c2, c3}, xl);
  }
  return out;
}

} // namespace wentzell
