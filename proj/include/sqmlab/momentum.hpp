#pragma once

#include <complex>
#include <vector>

#include "sqmlab/field.hpp"

namespace sqmlab {

/// Momentum-space samples of a wave function, Psi~(p) = integral of
/// Psi(x) exp(-i p.x/hbar) d^dx. values follow the same flat node order
/// as a Field on pgrid.
struct MomentumSpectrum {
  Grid pgrid;                                // g cm/s per axis
  std::vector<std::complex<double>> values;
  double hbar = 0.0;
  double support_radius = 0.0;               // p_max; values are 0 outside |p| > p_max
  double margin = 0.0;                       // epsilon of p_max = (1-eps) m c, when applicable
  bool boundary_leak = false;                // position-space decay precondition violated

  std::complex<double>& operator[](std::size_t k) { return values[k]; }
  const std::complex<double>& operator[](std::size_t k) const { return values[k]; }
};

/// Momentum grid conjugate to a position grid: same node count per axis,
/// spacing 2 pi hbar / (n h), symmetric about zero.
Grid conjugate_momentum_grid(const Grid& xgrid, double hbar);

/// Direct quadrature of the transform on the conjugate momentum grid.
/// If |Psi| on the boundary exceeds 1e-10 of its peak, the returned
/// spectrum carries boundary_leak = true.
MomentumSpectrum to_momentum(const ComplexField& psi, double hbar);

/// Inverse transform with the 1/(2 pi hbar)^d normalization, evaluated on
/// an arbitrary position grid.
ComplexField from_momentum(const MomentumSpectrum& spec, const Grid& xgrid,
                           Boundary bc = Boundary::dirichlet);

}  // namespace sqmlab
