#pragma once

#include <cstddef>
#include <vector>

namespace wentzell {

/// Partition of [0,1] that contains the degeneracy point x0 as a node.
class Mesh {
public:
  /// Validates strictly increasing nodes from 0 to 1 and that nodes[x0_index] is x0.
  Mesh(std::vector<double> nodes, std::size_t x0_index, double grading = 1.0);

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t element_count() const noexcept { return nodes_.size() - 1; }
  std::size_t x0_index() const noexcept { return x0_index_; }
  double x0() const noexcept { return nodes_[x0_index_]; }
  double grading() const noexcept { return grading_; }

  double left(std::size_t e) const { return nodes_[e]; }
  double right(std::size_t e) const { return nodes_[e + 1]; }
  double length(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
  /// Element containing x; at interior nodes the element to the right.
  std::size_t locate(double x) const;
  /// Element has x0 as one of its end points.
  bool touches_x0(std::size_t e) const noexcept { return e + 1 == x0_index_ || e == x0_index_; }

private:
  std::vector<double> nodes_;
  std::size_t x0_index_;
  double grading_;
};

/// n elements, x0 in (0,1) a node.  Elements are split between [0,x0] and
/// [x0,1] in proportion to their lengths; with grading g > 1 the lengths on
/// each side form a geometric progression of ratio 1/g shrinking toward x0.
Mesh build_mesh(std::size_t n, double x0, double grading = 1.0);

} // namespace wentzell
