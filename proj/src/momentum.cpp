#include "sqmlab/momentum.hpp"

#include <cmath>
#include <limits>

#include "sqmlab/errors.hpp"
#include "sqmlab/field_ops.hpp"

namespace sqmlab {

namespace {

using cplx = std::complex<double>;

// Applies a dense per-axis kernel K[j][k] (row j: output node, column k:
// input node) to every grid line along `axis`.
std::vector<cplx> apply_axis_kernel(const std::vector<cplx>& in, const Grid& gin,
                                    const Grid& gout, int axis,
                                    const std::vector<cplx>& kernel) {
  const int n_in = gin.n(axis);
  const int n_out = gout.n(axis);
  const std::size_t stride_in = detail::axis_stride(gin, axis);
  const std::size_t stride_out = detail::axis_stride(gout, axis);

  // Line enumeration: all nodes with index 0 along `axis`.
  std::vector<cplx> out(gout.node_count(), cplx{});
  std::vector<cplx> line(n_in);
  const std::size_t total_in = gin.node_count();
  for (std::size_t start = 0; start < total_in; ++start) {
    const int i = static_cast<int>((start / stride_in) % static_cast<std::size_t>(n_in));
    if (i != 0) continue;
    for (int k = 0; k < n_in; ++k) line[k] = in[start + k * stride_in];
    // Output line shares the same cross-axis offsets. Offsets translate
    // because only the `axis` extent differs between the two grids.
    const std::size_t block = start / (stride_in * n_in);
    const std::size_t within = start % stride_in;
    const std::size_t out_start = block * stride_out * n_out + within;
    for (int j = 0; j < n_out; ++j) {
      cplx acc{};
      const cplx* row = &kernel[static_cast<std::size_t>(j) * n_in];
      for (int k = 0; k < n_in; ++k) acc += row[k] * line[k];
      out[out_start + j * stride_out] = acc;
    }
  }
  return out;
}

}  // namespace

Grid conjugate_momentum_grid(const Grid& xgrid, double hbar) {
  if (hbar <= 0.0) throw InvalidInput("conjugate_momentum_grid: hbar must be positive");
  Axis axes[3];
  for (int a = 0; a < xgrid.dim(); ++a) {
    const int n = xgrid.n(a);
    const double dp = 2.0 * M_PI * hbar / (n * xgrid.spacing(a));
    const double half = 0.5 * (n - 1) * dp;
    axes[a] = Axis{-half, half, n};
  }
  if (xgrid.dim() == 1) return Grid(axes[0]);
  if (xgrid.dim() == 2) return Grid(axes[0], axes[1]);
  return Grid(axes[0], axes[1], axes[2]);
}

MomentumSpectrum to_momentum(const ComplexField& psi, double hbar) {
  psi.require_finite("to_momentum");
  const Grid& gx = psi.grid();
  const Grid gp = conjugate_momentum_grid(gx, hbar);

  // Boundary-leak diagnostic: the quadrature assumes the packet has
  // decayed before the box edge.
  double peak = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) peak = std::max(peak, std::abs(psi[k]));
  double edge = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    int idx[3];
    gx.unflatten(k, idx);
    bool on_edge = false;
    for (int a = 0; a < gx.dim(); ++a)
      if (idx[a] == 0 || idx[a] == gx.n(a) - 1) on_edge = true;
    if (on_edge) edge = std::max(edge, std::abs(psi[k]));
  }

  MomentumSpectrum spec;
  spec.pgrid = gp;
  spec.hbar = hbar;
  spec.support_radius = std::numeric_limits<double>::infinity();
  spec.boundary_leak = peak > 0.0 && edge > 1e-10 * peak;

  std::vector<cplx> work = psi.values();
  Grid gcur = gx;
  for (int a = 0; a < gx.dim(); ++a) {
    const int n = gx.n(a);
    std::vector<cplx> kernel(static_cast<std::size_t>(gp.n(a)) * n);
    for (int j = 0; j < gp.n(a); ++j) {
      const double p = gp.coord(a, j);
      for (int k = 0; k < n; ++k) {
        const double x = gx.coord(a, k);
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        const double phase = -p * x / hbar;
        kernel[static_cast<std::size_t>(j) * n + k] =
            w * gx.spacing(a) * cplx(std::cos(phase), std::sin(phase));
      }
    }
    // Replace the axis extent as each axis moves to momentum space.
    Axis mixed[3];
    for (int b = 0; b < gx.dim(); ++b)
      mixed[b] = (b <= a) ? Axis{gp.lo(b), gp.hi(b), gp.n(b)}
                          : Axis{gx.lo(b), gx.hi(b), gx.n(b)};
    Grid gnext = (gx.dim() == 1) ? Grid(mixed[0])
               : (gx.dim() == 2) ? Grid(mixed[0], mixed[1])
                                 : Grid(mixed[0], mixed[1], mixed[2]);
    work = apply_axis_kernel(work, gcur, gnext, a, kernel);
    gcur = gnext;
  }
  spec.values = std::move(work);
  return spec;
}

ComplexField from_momentum(const MomentumSpectrum& spec, const Grid& xgrid, Boundary bc) {
  const Grid& gp = spec.pgrid;
  if (gp.dim() != xgrid.dim()) throw InvalidInput("from_momentum: dimension mismatch");
  const double hbar = spec.hbar;
  if (hbar <= 0.0) throw InvalidInput("from_momentum: spectrum lacks a positive hbar");

  std::vector<cplx> work = spec.values;
  Grid gcur = gp;
  double norm = 1.0;
  for (int a = 0; a < gp.dim(); ++a) {
    norm /= 2.0 * M_PI * hbar;
    const int n = gp.n(a);
    std::vector<cplx> kernel(static_cast<std::size_t>(xgrid.n(a)) * n);
    for (int j = 0; j < xgrid.n(a); ++j) {
      const double x = xgrid.coord(a, j);
      for (int k = 0; k < n; ++k) {
        const double p = gp.coord(a, k);
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        const double phase = p * x / hbar;
        kernel[static_cast<std::size_t>(j) * n + k] =
            w * gp.spacing(a) * cplx(std::cos(phase), std::sin(phase));
      }
    }
    Axis mixed[3];
    for (int b = 0; b < gp.dim(); ++b)
      mixed[b] = (b <= a) ? Axis{xgrid.lo(b), xgrid.hi(b), xgrid.n(b)}
                          : Axis{gp.lo(b), gp.hi(b), gp.n(b)};
    Grid gnext = (gp.dim() == 1) ? Grid(mixed[0])
               : (gp.dim() == 2) ? Grid(mixed[0], mixed[1])
                                 : Grid(mixed[0], mixed[1], mixed[2]);
    work = apply_axis_kernel(work, gcur, gnext, a, kernel);
    gcur = gnext;
  }
  ComplexField out(xgrid, bc);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = norm * work[k];
  return out;
}

}  // namespace sqmlab
