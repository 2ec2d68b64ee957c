#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "sqmlab/grid.hpp"

namespace sqmlab {

/// Boundary convention carried by every field. Dirichlet treats the
/// function as clamped to zero outside the box; periodic identifies the
/// two endpoint nodes of each axis (f at hi equals f at lo).
enum class Boundary { dirichlet, periodic };

template <class T>
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, Boundary bc = Boundary::dirichlet)
      : grid_(g), bc_(bc), v_(g.node_count(), T{}) {}

  template <class Fn>
  static Field sample(const Grid& g, Fn&& fn, Boundary bc = Boundary::dirichlet) {
    Field f(g, bc);
    for (std::size_t k = 0; k < f.v_.size(); ++k) f.v_[k] = fn(g.point(k));
    return f;
  }

  const Grid& grid() const { return grid_; }
  Boundary boundary() const { return bc_; }
  void set_boundary(Boundary bc) { bc_ = bc; }

  std::size_t size() const { return v_.size(); }
  T& operator[](std::size_t k) { return v_[k]; }
  const T& operator[](std::size_t k) const { return v_[k]; }
  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }
  std::vector<T>& values() { return v_; }
  const std::vector<T>& values() const { return v_; }

  bool all_finite() const {
    for (const T& x : v_)
      if (!is_finite(x)) return false;
    return true;
  }

  void require_finite(const char* what) const {
    if (!all_finite()) throw InvalidInput(std::string(what) + ": non-finite field value");
  }

 private:
  static bool is_finite(double x) { return std::isfinite(x); }
  static bool is_finite(const std::complex<double>& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  }

  Grid grid_;
  Boundary bc_ = Boundary::dirichlet;
  std::vector<T> v_;
};

using ScalarField = Field<double>;
using ComplexField = Field<std::complex<double>>;

/// Real vector field with d components stored component-major.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g, Boundary bc = Boundary::dirichlet)
      : grid_(g), bc_(bc) {
    for (int a = 0; a < g.dim(); ++a) c_[a].assign(g.node_count(), 0.0);
  }

  const Grid& grid() const { return grid_; }
  Boundary boundary() const { return bc_; }

  std::vector<double>& component(int axis) { return c_[axis]; }
  const std::vector<double>& component(int axis) const { return c_[axis]; }

  Vec3 value(std::size_t node) const {
    Vec3 r;
    for (int a = 0; a < grid_.dim(); ++a) r[a] = c_[a][node];
    return r;
  }
  void set(std::size_t node, const Vec3& val) {
    for (int a = 0; a < grid_.dim(); ++a) c_[a][node] = val[a];
  }

 private:
  Grid grid_;
  Boundary bc_ = Boundary::dirichlet;
  std::array<std::vector<double>, 3> c_;
};

}  // namespace sqmlab
