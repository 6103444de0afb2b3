#include "curvedq/grid.hpp"

#include "curvedq/errors.hpp"

namespace curvedq {

std::string to_string(Boundary bc) {
  switch (bc) {
    case Boundary::periodic:
      return "periodic";
    case Boundary::dirichlet_zero:
      return "dirichlet-zero";
    case Boundary::zero_flux_closure:
      return "zero-flux-closure";
  }
  return "unknown";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "dirichlet" || name == "dirichlet-zero") return Boundary::dirichlet_zero;
  if (name == "closure" || name == "zero-flux-closure") return Boundary::zero_flux_closure;
  throw ConfigError("unknown boundary condition '" + name + "'");
}

double GridAxis::h() const {
  return bc == Boundary::dirichlet_zero ? range.span() / (n + 1) : range.span() / n;
}

double GridAxis::node(int i) const {
  return bc == Boundary::dirichlet_zero ? range.min + (i + 1) * h() : range.min + (i + 0.5) * h();
}

Grid::Grid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.size() < 2 || axes_.size() > 3) throw BadResolution("grid rank must be 2 or 3");
  size_ = 1;
  for (const auto& ax : axes_) {
    if (ax.n < 4) throw BadResolution("every grid axis needs at least 4 nodes");
    if (!(ax.range.span() > 0.0)) throw BadResolution("grid axis has an empty range");
    size_ *= static_cast<std::size_t>(ax.n);
  }
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.h();
  return v;
}

std::size_t Grid::index(const std::array<int, 3>& multi) const {
  std::size_t idx = 0;
  for (int a = rank() - 1; a >= 0; --a) idx = idx * axes_[a].n + multi[a];
  return idx;
}

std::array<int, 3> Grid::multi_index(std::size_t node) const {
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < rank(); ++a) {
    m[a] = static_cast<int>(node % axes_[a].n);
    node /= axes_[a].n;
  }
  return m;
}

std::array<double, 3> Grid::coords(std::size_t node) const {
  const auto m = multi_index(node);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < rank(); ++a) x[a] = axes_[a].node(m[a]);
  return x;
}

Coord2 Grid::coord2(std::size_t node) const {
  const auto x = coords(node);
  return {x[0], x[1]};
}

std::optional<std::size_t> Grid::neighbor(std::size_t node, int axis, int dir) const {
  auto m = multi_index(node);
  const int n = axes_[axis].n;
  int j = m[axis] + dir;
  if (j < 0 || j >= n) {
    if (axes_[axis].bc != Boundary::periodic) return std::nullopt;
    j = (j + n) % n;
  }
  m[axis] = j;
  return index(m);
}

std::size_t Grid::face_count(int axis) const {
  return size_ / axes_[axis].n * (axes_[axis].n + 1);
}

std::size_t Grid::face_index(const std::array<int, 3>& multi, int axis) const {
  std::size_t idx = 0;
  for (int a = rank() - 1; a >= 0; --a) {
    const int extent = a == axis ? axes_[a].n + 1 : axes_[a].n;
    idx = idx * extent + multi[a];
  }
  return idx;
}

std::array<double, 3> Grid::face_coords(const std::array<int, 3>& multi, int axis) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < rank(); ++a) {
    x[a] = a == axis ? axes_[a].face(multi[a]) : axes_[a].node(multi[a]);
  }
  return x;
}

}  // namespace curvedq
