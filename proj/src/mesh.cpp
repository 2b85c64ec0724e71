#include "wentzell/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wentzell {

Mesh::Mesh(std::vector<double> nodes, std::size_t x0_index, double grading)
    : nodes_(std::move(nodes)), x0_index_(x0_index), grading_(grading) {
  if (nodes_.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw std::invalid_argument("mesh must start at 0 and end at 1");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("mesh nodes must be strictly increasing");
  if (x0_index_ >= nodes_.size()) throw std::invalid_argument("x0 index out of range");
  if (!(grading_ >= 1.0)) throw std::invalid_argument("grading must be >= 1");
}

std::size_t Mesh::locate(double x) const {
  if (x < 0.0 || x > 1.0) throw std::out_of_range("coordinate outside [0,1]");
  const auto it = std::upper_bound(nodes_.begin() + 1, nodes_.end() - 1, x);
  return static_cast<std::size_t>(it - (nodes_.begin() + 1));
}

namespace {

// Element lengths on an interval of given length, count elements, the last
// one adjacent to x0 the smallest.
std::vector<double> side_lengths(double length, std::size_t count, double grading) {
  std::vector<double> w(count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    w[i] = std::pow(grading, static_cast<double>(count - 1 - i));
    total += w[i];
  }
  for (double& v : w) v *= length / total;
  return w;
}

} // namespace

Mesh build_mesh(std::size_t n, double x0, double grading) {
  if (n < 2) throw std::invalid_argument("build_mesh: need at least 2 elements");
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::invalid_argument("build_mesh: x0 must be interior to (0,1)");
  if (!(grading >= 1.0)) throw std::invalid_argument("build_mesh: grading must be >= 1");
  auto n_left = static_cast<std::size_t>(std::llround(static_cast<double>(n) * x0));
  n_left = std::clamp<std::size_t>(n_left, 1, n - 1);
  const std::size_t n_right = n - n_left;

  std::vector<double> nodes;
  nodes.reserve(n + 1);
  nodes.push_back(0.0);
  const auto left = side_lengths(x0, n_left, grading);
  double x = 0.0;
  for (std::size_t i = 0; i + 1 < n_left; ++i) nodes.push_back(x += left[i]);
  nodes.push_back(x0);
  // Right side mirrored: smallest element next to x0.
  auto right = side_lengths(1.0 - x0, n_right, grading);
  std::reverse(right.begin(), right.end());
  x = x0;
  for (std::size_t i = 0; i + 1 < n_right; ++i) nodes.push_back(x += right[i]);
  nodes.push_back(1.0);
  return Mesh(std::move(nodes), n_left, grading);
}

} // namespace wentzell
