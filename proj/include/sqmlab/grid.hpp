#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "sqmlab/errors.hpp"
#include "sqmlab/vec.hpp"

namespace sqmlab {

/// Per-axis extent of a uniform grid. Both endpoints are grid nodes.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 4;
};

/// Uniform Cartesian grid in 1, 2 or 3 dimensions. Node k along an axis
/// sits at lo + k*h with h = (hi - lo)/(n - 1). Flattened storage is
/// row-major with the last axis fastest.
class Grid {
 public:
  Grid() : Grid(Axis{}) {}

  explicit Grid(Axis x) : dim_(1), axes_{x, {0, 0, 1}, {0, 0, 1}} { init(); }
  Grid(Axis x, Axis y) : dim_(2), axes_{x, y, {0, 0, 1}} { init(); }
  Grid(Axis x, Axis y, Axis z) : dim_(3), axes_{x, y, z} { init(); }

  /// Symmetric box [-half, half]^d with n nodes per axis.
  static Grid centered(int dim, double half, int n) {
    Axis a{-half, half, n};
    if (dim == 1) return Grid(a);
    if (dim == 2) return Grid(a, a);
    if (dim == 3) return Grid(a, a, a);
    throw InvalidInput("Grid::centered: dimension must be 1, 2 or 3");
  }

  int dim() const { return dim_; }
  int n(int axis) const { return axes_[axis].n; }
  double lo(int axis) const { return axes_[axis].lo; }
  double hi(int axis) const { return axes_[axis].hi; }
  double spacing(int axis) const { return h_[axis]; }
  double extent(int axis) const { return axes_[axis].hi - axes_[axis].lo; }

  std::size_t node_count() const { return count_; }

  double coord(int axis, int index) const { return axes_[axis].lo + index * h_[axis]; }

  std::size_t flat(int ix, int iy = 0, int iz = 0) const {
    return (static_cast<std::size_t>(ix) * axes_[1].n + iy) * axes_[2].n + iz;
  }

  void unflatten(std::size_t node, int idx[3]) const {
    idx[2] = static_cast<int>(node % axes_[2].n);
    node /= axes_[2].n;
    idx[1] = static_cast<int>(node % axes_[1].n);
    idx[0] = static_cast<int>(node / axes_[1].n);
  }

  Vec3 point(std::size_t node) const {
    int idx[3];
    unflatten(node, idx);
    Vec3 p;
    for (int a = 0; a < dim_; ++a) p[a] = coord(a, idx[a]);
    return p;
  }

  /// Product trapezoid quadrature weight of a node (endpoint factors 1/2).
  double quad_weight(std::size_t node) const {
    int idx[3];
    unflatten(node, idx);
    double w = 1.0;
    for (int a = 0; a < dim_; ++a) {
      double f = (idx[a] == 0 || idx[a] == axes_[a].n - 1) ? 0.5 : 1.0;
      w *= f * h_[a];
    }
    return w;
  }

  /// Volume element h^d (finite-volume cell measure).
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= h_[a];
    return v;
  }

  bool contains(const Vec3& p) const {
    for (int a = 0; a < dim_; ++a)
      if (p[a] < axes_[a].lo || p[a] > axes_[a].hi) return false;
    return true;
  }

  /// Node whose coordinates are closest to p.
  std::size_t nearest_node(const Vec3& p) const {
    int idx[3] = {0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      int k = static_cast<int>((p[a] - axes_[a].lo) / h_[a] + 0.5);
      if (k < 0) k = 0;
      if (k >= axes_[a].n) k = axes_[a].n - 1;
      idx[a] = k;
    }
    return flat(idx[0], idx[1], idx[2]);
  }

  bool operator==(const Grid& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a)
      if (axes_[a].lo != o.axes_[a].lo || axes_[a].hi != o.axes_[a].hi ||
          axes_[a].n != o.axes_[a].n)
        return false;
    return true;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  void init() {
    count_ = 1;
    for (int a = 0; a < dim_; ++a) {
      const Axis& ax = axes_[a];
      if (ax.n < 4) throw InvalidInput("Grid: need at least 4 nodes per axis");
      if (!(ax.hi > ax.lo)) throw InvalidInput("Grid: axis extent must be positive");
      h_[a] = (ax.hi - ax.lo) / (ax.n - 1);
      count_ *= static_cast<std::size_t>(ax.n);
    }
    for (int a = dim_; a < 3; ++a) h_[a] = 1.0;
  }

  int dim_;
  std::array<Axis, 3> axes_;
  std::array<double, 3> h_ = {1.0, 1.0, 1.0};
  std::size_t count_ = 0;
};

}  // namespace sqmlab
