#pragma once

#include <complex>
#include <type_traits>

#include "sqmlab/field.hpp"

namespace sqmlab {

namespace detail {

inline std::size_t axis_stride(const Grid& g, int axis) {
  std::size_t s = 1;
  for (int a = 2; a > axis; --a) s *= static_cast<std::size_t>(g.n(a) > 0 ? g.n(a) : 1);
  return s;
}

}  // namespace detail

/// First derivative along one axis. Second-order central differences in
/// the interior; one-sided second-order stencils at Dirichlet boundaries;
/// wrap-around (seam node identified) for periodic fields.
template <class T>
Field<T> axis_derivative(const Field<T>& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw InvalidInput("axis_derivative: bad axis");
  const int n = g.n(axis);
  const double h = g.spacing(axis);
  const std::size_t stride = detail::axis_stride(g, axis);
  Field<T> out(g, f.boundary());
  const bool periodic = f.boundary() == Boundary::periodic;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
    T d;
    if (i > 0 && i < n - 1) {
      d = (f[k + stride] - f[k - stride]) / (2.0 * h);
    } else if (periodic) {
      // left neighbor of node 0 is node n-2; right neighbor of n-1 is node 1
      const std::size_t up = (i == n - 1) ? k - (n - 2) * stride : k + stride;
      const std::size_t dn = (i == 0) ? k + (n - 2) * stride : k - stride;
      d = (f[up] - f[dn]) / (2.0 * h);
    } else if (i == 0) {
      d = (-3.0 * f[k] + 4.0 * f[k + stride] - f[k + 2 * stride]) / (2.0 * h);
    } else {
      d = (3.0 * f[k] - 4.0 * f[k - stride] + f[k - 2 * stride]) / (2.0 * h);
    }
    out[k] = d;
  }
  return out;
}

/// Second derivative along one axis, same boundary rules as axis_derivative.
template <class T>
Field<T> axis_second_derivative(const Field<T>& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw InvalidInput("axis_second_derivative: bad axis");
  const int n = g.n(axis);
  const double h2 = g.spacing(axis) * g.spacing(axis);
  const std::size_t stride = detail::axis_stride(g, axis);
  Field<T> out(g, f.boundary());
  const bool periodic = f.boundary() == Boundary::periodic;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
    T d;
    if (i > 0 && i < n - 1) {
      d = (f[k + stride] - 2.0 * f[k] + f[k - stride]) / h2;
    } else if (periodic) {
      const std::size_t up = (i == n - 1) ? k - (n - 2) * stride : k + stride;
      const std::size_t dn = (i == 0) ? k + (n - 2) * stride : k - stride;
      d = (f[up] - 2.0 * f[k] + f[dn]) / h2;
    } else if (i == 0) {
      d = (2.0 * f[k] - 5.0 * f[k + stride] + 4.0 * f[k + 2 * stride] -
           f[k + 3 * stride]) / h2;
    } else {
      d = (2.0 * f[k] - 5.0 * f[k - stride] + 4.0 * f[k - 2 * stride] -
           f[k - 3 * stride]) / h2;
    }
    out[k] = d;
  }
  return out;
}

template <class T>
Field<T> laplacian(const Field<T>& f) {
  Field<T> out = axis_second_derivative(f, 0);
  for (int a = 1; a < f.grid().dim(); ++a) {
    Field<T> da = axis_second_derivative(f, a);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += da[k];
  }
  return out;
}

inline VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid(), f.boundary());
  for (int a = 0; a < f.grid().dim(); ++a) out.component(a) = axis_derivative(f, a).values();
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid(), v.boundary());
  for (int a = 0; a < v.grid().dim(); ++a) {
    ScalarField comp(v.grid(), v.boundary());
    comp.values() = v.component(a);
    ScalarField d = axis_derivative(comp, a);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d[k];
  }
  return out;
}

/// Trapezoidal quadrature over the whole grid.
template <class T>
T integrate(const Field<T>& f) {
  T acc{};
  const Grid& g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * g.quad_weight(k);
  return acc;
}

/// Trapezoidal quadrature of fn(node value, node index).
template <class T, class Fn>
auto integrate_with(const Field<T>& f, Fn&& fn) {
  using R = decltype(fn(f[0], std::size_t{0}));
  R acc{};
  for (std::size_t k = 0; k < f.size(); ++k)
    acc += fn(f[k], k) * f.grid().quad_weight(k);
  return acc;
}

inline double l2_norm(const ScalarField& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * f[k] * f.grid().quad_weight(k);
  return std::sqrt(acc);
}

inline double l2_norm(const ComplexField& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += std::norm(f[k]) * f.grid().quad_weight(k);
  return std::sqrt(acc);
}

inline double l1_norm(const ScalarField& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += std::abs(f[k]) * f.grid().quad_weight(k);
  return acc;
}

template <class T>
double linf_norm(const Field<T>& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
  return m;
}

/// Multilinear interpolation of raw node values at an in-bounds point.
inline double interpolate_values(const Grid& g, const std::vector<double>& v, const Vec3& p) {
  if (!g.contains(p)) throw InvalidInput("interpolate: point outside grid");
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    double s = (p[a] - g.lo(a)) / g.spacing(a);
    int i = static_cast<int>(s);
    if (i >= g.n(a) - 1) i = g.n(a) - 2;
    base[a] = i;
    frac[a] = s - i;
  }
  const int d = g.dim();
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    int idx[3] = {base[0], base[1], base[2]};
    for (int a = 0; a < d; ++a) {
      if (corner & (1 << a)) {
        idx[a] += 1;
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    acc += w * v[g.flat(idx[0], idx[1], idx[2])];
  }
  return acc;
}

inline double interpolate(const ScalarField& f, const Vec3& p) {
  return interpolate_values(f.grid(), f.values(), p);
}

/// Exact partial derivative of the multilinear interpolant along `axis`.
/// At a face midpoint this reduces to the two-node difference quotient,
/// which is what conservative face fluxes sample.
inline double interpolate_derivative(const Grid& g, const std::vector<double>& v,
                                     const Vec3& p, int axis) {
  if (!g.contains(p)) throw InvalidInput("interpolate_derivative: point outside grid");
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    double s = (p[a] - g.lo(a)) / g.spacing(a);
    int i = static_cast<int>(s);
    if (i >= g.n(a) - 1) i = g.n(a) - 2;
    base[a] = i;
    frac[a] = s - i;
  }
  const int d = g.dim();
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    int idx[3] = {base[0], base[1], base[2]};
    for (int a = 0; a < d; ++a) {
      const bool high = corner & (1 << a);
      if (high) idx[a] += 1;
      if (a == axis)
        w *= high ? 1.0 : -1.0;
      else
        w *= high ? frac[a] : 1.0 - frac[a];
    }
    acc += w * v[g.flat(idx[0], idx[1], idx[2])];
  }
  return acc / g.spacing(axis);
}

inline Vec3 interpolate(const VectorField& v, const Vec3& p) {
  Vec3 r;
  for (int a = 0; a < v.grid().dim(); ++a)
    r[a] = interpolate_values(v.grid(), v.component(a), p);
  return r;
}

}  // namespace sqmlab
