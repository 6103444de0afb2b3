#pragma once

#include "curvedq/geometry.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace curvedq {

enum class Boundary {
  periodic,
  dirichlet_zero,
  zero_flux_closure,
};

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

/// One axis of a structured grid.
///
/// Periodic and closed axes are cell-centered: nodes at min + (i + 1/2) h with
/// h = span / n, faces at min + k h. Dirichlet axes place the n nodes strictly
/// inside the interval, min + (i + 1) h with h = span / (n + 1), so the zero
/// ghost values sit exactly on the boundary.
struct GridAxis {
  Interval range;
  int n = 0;
  Boundary bc = Boundary::periodic;

  double h() const;
  double node(int i) const;
  /// Face k separates node k-1 and node k, k = 0..n.
  double face(int k) const { return node(k) - 0.5 * h(); }

  bool operator==(const GridAxis&) const = default;
};

/// Structured grid of rank 2 or 3; the first axis varies fastest.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<GridAxis> axes);

  int rank() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const GridAxis& axis(int a) const { return axes_[a]; }
  double cell_volume() const;

  std::size_t index(const std::array<int, 3>& multi) const;
  std::array<int, 3> multi_index(std::size_t node) const;

  /// Node coordinates (unused trailing entries are zero).
  std::array<double, 3> coords(std::size_t node) const;
  Coord2 coord2(std::size_t node) const;

  /// Neighbor along `axis` in direction dir = +1 / -1, wrapping on periodic
  /// axes; empty across Dirichlet or closure boundaries.
  std::optional<std::size_t> neighbor(std::size_t node, int axis, int dir) const;

  /// Faces normal to `axis`: same layout as the nodes with n_axis + 1 entries
  /// along that axis.
  std::size_t face_count(int axis) const;
  std::size_t face_index(const std::array<int, 3>& multi, int axis) const;
  std::array<double, 3> face_coords(const std::array<int, 3>& multi, int axis) const;

  bool operator==(const Grid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<GridAxis> axes_;
  std::size_t size_ = 0;
};

}  // namespace curvedq
