#include "sqmlab/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_set>

#include "sqmlab/errors.hpp"
#include "sqmlab/numerics.hpp"

namespace sqmlab::wiener {

namespace {

std::size_t snap_step(const markov::Ensemble& ens, double t, const char* what) {
  if (t < -1e-12 || t > ens.horizon * (1.0 + 1e-12))
    throw InvalidInput(std::string(what) + ": time outside the ensemble horizon");
  const double s = t / ens.dt;
  std::size_t step = static_cast<std::size_t>(std::llround(s));
  return std::min(step, ens.steps);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

template <class Fn>
MeanSe path_statistic(const markov::Ensemble& ens, Fn&& value_of_path) {
  const std::size_t n = ens.paths;
  double sum = 0.0;
  std::vector<double> vals(n);
  for (std::size_t p = 0; p < n; ++p) {
    vals[p] = value_of_path(p);
    sum += vals[p];
  }
  MeanSe out;
  out.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double v : vals) var += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(var) / static_cast<double>(n);
  return out;
}

}  // namespace

CovarianceEstimate covariance(const markov::Ensemble& ensemble, double t1, double t2) {
  if (!ensemble.zero_drift)
    throw InvalidInput("wiener::covariance: ensemble must be generated with zero drift");
  const std::size_t s1 = snap_step(ensemble, t1, "covariance");
  const std::size_t s2 = snap_step(ensemble, t2, "covariance");
  const MeanSe stat = path_statistic(ensemble, [&](std::size_t p) {
    return ensemble.position(p, s1)[0] * ensemble.position(p, s2)[0];
  });
  CovarianceEstimate est;
  est.t1 = s1 * ensemble.dt;
  est.t2 = s2 * ensemble.dt;
  est.value = stat.mean;
  est.std_error = stat.se;
  est.samples = ensemble.paths;
  return est;
}

SlopePair one_sided_derivative(const markov::Ensemble& ensemble, double t2, double delta) {
  if (!ensemble.zero_drift)
    throw InvalidInput("wiener::one_sided_derivative: needs a zero-drift ensemble");
  if (delta < ensemble.dt * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "one_sided_derivative: delta below the stored step; need delta >= "
        << ensemble.dt;
    throw InvalidInput(msg.str());
  }
  const std::size_t s2 = snap_step(ensemble, t2, "one_sided_derivative");
  const std::size_t sd = snap_step(ensemble, delta, "one_sided_derivative");
  if (sd == 0 || s2 < sd || s2 + sd > ensemble.steps)
    throw InvalidInput("one_sided_derivative: t2 +/- delta outside the horizon");
  const double d = sd * ensemble.dt;

  const MeanSe below = path_statistic(ensemble, [&](std::size_t p) {
    const double w2 = ensemble.position(p, s2)[0];
    return (w2 - ensemble.position(p, s2 - sd)[0]) * w2 / d;
  });
  const MeanSe above = path_statistic(ensemble, [&](std::size_t p) {
    const double w2 = ensemble.position(p, s2)[0];
    return (ensemble.position(p, s2 + sd)[0] - w2) * w2 / d;
  });
  return SlopePair{below.mean, below.se, above.mean, above.se};
}

DimensionReport fractal_dimension(const std::vector<Vec3>& path, int dim,
                                  const DimensionOptions& opts) {
  if (dim < 2 || dim > 3)
    throw InvalidInput("fractal_dimension: spatial dimension must be 2 or 3");
  if (path.size() < 100000)
    throw InvalidInput("fractal_dimension: need at least 1e5 path points");

  // rms step and bounding box
  double step_sq = 0.0;
  Vec3 lo = path.front(), hi = path.front();
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i + 1 < path.size()) {
      Vec3 d = path[i + 1] - path[i];
      d[2] = dim > 2 ? d[2] : 0.0;
      step_sq += norm_sq(d);
    }
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], path[i][a]);
      hi[a] = std::max(hi[a], path[i][a]);
    }
  }
  const double rms_step = std::sqrt(step_sq / static_cast<double>(path.size() - 1));
  double extent = 0.0;
  for (int a = 0; a < dim; ++a) extent = std::max(extent, hi[a] - lo[a]);
  if (!(extent > 0.0) || !(rms_step > 0.0))
    throw InvalidInput("fractal_dimension: degenerate path");

  DimensionReport report;
  // Box sizes from the extent down to a quarter step, geometric.
  for (double size = extent; size > 0.25 * rms_step; size /= opts.size_ratio)
    report.box_sizes.push_back(size);
  report.box_counts.resize(report.box_sizes.size());

  for (std::size_t s = 0; s < report.box_sizes.size(); ++s) {
    const double inv = 1.0 / report.box_sizes[s];
    std::unordered_set<std::uint64_t> cells;
    cells.reserve(path.size() / 4);
    for (const Vec3& p : path) {
      const std::uint64_t ix = static_cast<std::uint64_t>((p[0] - lo[0]) * inv);
      const std::uint64_t iy = static_cast<std::uint64_t>((p[1] - lo[1]) * inv);
      const std::uint64_t iz =
          dim > 2 ? static_cast<std::uint64_t>((p[2] - lo[2]) * inv) : 0;
      cells.insert((ix << 42) | (iy << 21) | iz);
    }
    report.box_counts[s] = cells.size();
  }
  report.measured_decades =
      std::log10(report.box_sizes.front() / report.box_sizes.back());

  // Fit window between the step and extent scales.
  report.fit_window_lo = opts.fit_lo_steps * rms_step;
  report.fit_window_hi = extent / opts.fit_hi_extent;
  std::vector<double> lx, ly;
  for (std::size_t s = 0; s < report.box_sizes.size(); ++s) {
    const double size = report.box_sizes[s];
    if (size < report.fit_window_lo || size > report.fit_window_hi) continue;
    lx.push_back(std::log(size));
    ly.push_back(std::log(static_cast<double>(report.box_counts[s])));
  }
  if (lx.size() < 4) {
    std::ostringstream msg;
    msg << "fractal_dimension: scaling window too narrow (" << lx.size()
        << " sizes between " << report.fit_window_lo << " and " << report.fit_window_hi
        << "); lengthen the path or refine its steps";
    throw DiagnosticError(msg.str());
  }
  LinearFit fit = linear_fit(lx, ly);
  report.dimension = -fit.slope;
  report.fit_r_squared = fit.r_squared;
  return report;
}

std::vector<Vec3> path_points(const markov::Ensemble& ensemble, std::size_t path) {
  if (path >= ensemble.paths) throw InvalidInput("path_points: path index out of range");
  std::vector<Vec3> pts(ensemble.series_length());
  for (std::size_t s = 0; s < pts.size(); ++s) pts[s] = ensemble.position(path, s);
  return pts;
}

}  // namespace sqmlab::wiener
