#pragma once

#include <vector>

#include "sqmlab/markov.hpp"

namespace sqmlab::wiener {

struct CovarianceEstimate {
  double t1 = 0.0;
  double t2 = 0.0;
  double value = 0.0;      // sample E(w(t1) w(t2)), expected 2 nu min(t1,t2)
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Sample covariance of the first path component across a zero-drift
/// ensemble; times snap to the nearest stored step.
CovarianceEstimate covariance(const markov::Ensemble& ensemble, double t1, double t2);

struct SlopePair {
  double below = 0.0;      // expected 2 nu
  double below_std_error = 0.0;
  double above = 0.0;      // expected 0
  double above_std_error = 0.0;
};

/// One-sided slopes of E(w(t1) w(t2)) in t1 at t1 = t2, estimated per
/// path from increments over [t2 - delta, t2] and [t2, t2 + delta].
SlopePair one_sided_derivative(const markov::Ensemble& ensemble, double t2, double delta);

struct DimensionReport {
  double dimension = 0.0;
  double fit_r_squared = 0.0;
  double fit_window_lo = 0.0;          // box sizes used by the fit
  double fit_window_hi = 0.0;
  double measured_decades = 0.0;       // log10 span of all measured sizes
  std::vector<double> box_sizes;
  std::vector<std::size_t> box_counts;
};

struct DimensionOptions {
  double size_ratio = std::sqrt(2.0);  // geometric progression of box sizes
  double fit_lo_steps = 10.0;          // fit window: [lo * rms step, extent / hi]
  double fit_hi_extent = 10.0;
};

/// Box-counting dimension of a spatial trace in d >= 2, with the fit
/// restricted to the window between path-step and path-extent scales.
/// Throws DiagnosticError when the window holds fewer than four sizes.
DimensionReport fractal_dimension(const std::vector<Vec3>& path, int dim,
                                  const DimensionOptions& opts = {});

/// Convenience: first path of a zero-drift ensemble as a point list.
std::vector<Vec3> path_points(const markov::Ensemble& ensemble, std::size_t path);

}  // namespace sqmlab::wiener
