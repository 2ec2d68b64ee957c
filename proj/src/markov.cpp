#include "sqmlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "sqmlab/errors.hpp"
#include "sqmlab/field_ops.hpp"
#include "sqmlab/numerics.hpp"
#include "sqmlab/parallel.hpp"

namespace sqmlab::markov {

void Model::validate() const {
  if (nu < 0.0 || !std::isfinite(nu)) throw InvalidInput("markov: nu must be >= 0");
  if (dim < 1 || dim > 3) throw InvalidInput("markov: dimension must be 1..3");
}

Ensemble simulate(const Model& model, const InitialState& x0, double horizon, double dt,
                  std::size_t paths, std::uint64_t seed, int workers) {
  model.validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw InvalidInput("simulate: need dt, T > 0");
  if (paths < 1) throw InvalidInput("simulate: need at least one path");

  Ensemble ens;
  ens.dim = model.dim;
  ens.dt = dt;
  ens.horizon = horizon;
  ens.base_seed = seed;
  ens.paths = paths;
  ens.steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (ens.steps < 1) throw InvalidInput("simulate: horizon shorter than one step");
  ens.zero_drift = model.zero_drift();
  ens.data.assign(paths * ens.series_length() * model.dim, 0.0);

  const double step_sigma = std::sqrt(2.0 * model.nu * dt);
  const int d = model.dim;
  std::vector<std::pair<std::size_t, std::size_t>> failure(paths, {0, 0});
  std::vector<bool> failed(paths, false);

  parallel_for(paths, workers, [&](std::size_t p) {
    Rng rng = Rng::for_stream(seed, p);
    Vec3 x = x0.sampler ? x0.sampler(rng) : x0.point;
    double* series = &ens.data[p * ens.series_length() * d];
    for (int a = 0; a < d; ++a) series[a] = x[a];
    for (std::size_t s = 1; s <= ens.steps; ++s) {
      Vec3 b{};
      if (!ens.zero_drift) b = model.drift(x);
      for (int a = 0; a < d; ++a) {
        x[a] += b[a] * dt + step_sigma * rng.gaussian();
        if (!std::isfinite(x[a]) && !failed[p]) {
          failed[p] = true;
          failure[p] = {p, s};
        }
        series[s * d + a] = x[a];
      }
      if (failed[p]) return;
    }
  });
  for (std::size_t p = 0; p < paths; ++p)
    if (failed[p])
      throw SimulationError("simulate: non-finite state (drift blew up)", failure[p].first,
                            failure[p].second);
  return ens;
}

namespace {

// One zero-flux finite-volume sweep; face drifts are precomputed.
struct ForwardWorkspace {
  Grid grid;
  int dim;
  // face_b[a][face index within axis-a face array]
  std::array<std::vector<double>, 3> face_b;
  double max_abs_b = 0.0;

  explicit ForwardWorkspace(const Model& model, const Grid& g) : grid(g), dim(g.dim()) {
    for (int a = 0; a < dim; ++a) {
      const std::size_t stride = detail::axis_stride(g, a);
      const int n = g.n(a);
      face_b[a].assign(g.node_count(), 0.0);  // indexed by the lower node
      if (model.zero_drift()) continue;
      for (std::size_t k = 0; k < g.node_count(); ++k) {
        const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
        if (i >= n - 1) continue;
        Vec3 mid = g.point(k);
        mid[a] += 0.5 * g.spacing(a);
        const double b = model.drift(mid)[a];
        face_b[a][k] = b;
        max_abs_b = std::max(max_abs_b, std::abs(b));
      }
    }
  }
};

void forward_sweep(const ForwardWorkspace& ws, double nu, double dt,
                   std::vector<double>& p, std::vector<double>& scratch) {
  const Grid& g = ws.grid;
  scratch = p;
  for (int a = 0; a < ws.dim; ++a) {
    const std::size_t stride = detail::axis_stride(g, a);
    const int n = g.n(a);
    const double h = g.spacing(a);
    const double r = dt / h;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
      if (i >= n - 1) continue;
      const double flux =
          ws.face_b[a][k] * 0.5 * (p[k] + p[k + stride]) - nu * (p[k + stride] - p[k]) / h;
      scratch[k] -= r * flux;
      scratch[k + stride] += r * flux;
    }
  }
  p.swap(scratch);
}

double stable_step(const ForwardWorkspace& ws, double nu, double cfl_safety = 0.8) {
  const Grid& g = ws.grid;
  double inv_h2 = 0.0, h_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < ws.dim; ++a) {
    inv_h2 += 1.0 / (g.spacing(a) * g.spacing(a));
    h_min = std::min(h_min, g.spacing(a));
  }
  double dt = std::numeric_limits<double>::infinity();
  if (nu > 0.0) dt = std::min(dt, 1.0 / (2.0 * nu * inv_h2));
  if (ws.max_abs_b > 0.0) dt = std::min(dt, h_min / ws.max_abs_b);
  if (!std::isfinite(dt))
    throw InvalidInput("kolmogorov: degenerate model (nu = 0 and b = 0)");
  return cfl_safety * dt;
}

void evolve_forward(const ForwardWorkspace& ws, double nu, std::vector<double>& p, double t,
                    GridSolveDiagnostics* diag) {
  if (t < 0.0) throw InvalidInput("kolmogorov_forward: negative time");
  if (t == 0.0) {
    if (diag) *diag = {0, 0.0};
    return;
  }
  const double dt_max = stable_step(ws, nu);
  const std::size_t substeps = static_cast<std::size_t>(std::ceil(t / dt_max));
  const double dt = t / static_cast<double>(substeps);
  std::vector<double> scratch(p.size());
  for (std::size_t s = 0; s < substeps; ++s) forward_sweep(ws, nu, dt, p, scratch);
  if (diag) *diag = {substeps, dt};
}

}  // namespace

ScalarField kolmogorov_forward(const Model& model, const ScalarField& p0, double t,
                               GridSolveDiagnostics* diag) {
  model.validate();
  p0.require_finite("kolmogorov_forward");
  for (std::size_t k = 0; k < p0.size(); ++k)
    if (p0[k] < 0.0) throw InvalidInput("kolmogorov_forward: negative initial density");
  ForwardWorkspace ws(model, p0.grid());
  ScalarField out = p0;
  evolve_forward(ws, model.nu, out.values(), t, diag);
  return out;
}

ScalarField kolmogorov_backward(const Model& model, const ScalarField& f, double t,
                                GridSolveDiagnostics* diag) {
  model.validate();
  f.require_finite("kolmogorov_backward");
  const Grid& g = f.grid();
  const int dim = g.dim();

  // Node drifts for the non-conservative form.
  std::array<std::vector<double>, 3> node_b;
  double max_abs_b = 0.0;
  if (!model.zero_drift()) {
    for (int a = 0; a < dim; ++a) node_b[a].assign(g.node_count(), 0.0);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      const Vec3 b = model.drift(g.point(k));
      for (int a = 0; a < dim; ++a) {
        node_b[a][k] = b[a];
        max_abs_b = std::max(max_abs_b, std::abs(b[a]));
      }
    }
  }

  double inv_h2 = 0.0, h_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    inv_h2 += 1.0 / (g.spacing(a) * g.spacing(a));
    h_min = std::min(h_min, g.spacing(a));
  }
  double dt_max = std::numeric_limits<double>::infinity();
  if (model.nu > 0.0) dt_max = std::min(dt_max, 1.0 / (2.0 * model.nu * inv_h2));
  if (max_abs_b > 0.0) dt_max = std::min(dt_max, h_min / max_abs_b);
  if (!std::isfinite(dt_max)) {
    if (diag) *diag = {0, 0.0};
    return f;  // nu = 0, b = 0: expectations are frozen
  }
  dt_max *= 0.8;

  const std::size_t substeps =
      t > 0.0 ? static_cast<std::size_t>(std::ceil(t / dt_max)) : 0;
  const double dt = substeps ? t / static_cast<double>(substeps) : 0.0;

  ScalarField u = f;
  std::vector<double> next(u.size());
  for (std::size_t s = 0; s < substeps; ++s) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      double rhs = 0.0;
      for (int a = 0; a < dim; ++a) {
        const std::size_t stride = detail::axis_stride(g, a);
        const int n = g.n(a);
        const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
        const double h = g.spacing(a);
        double grad, lap;
        if (i == 0) {
          grad = (u[k + stride] - u[k]) / h;
          lap = 2.0 * (u[k + stride] - u[k]) / (h * h);  // mirror ghost
        } else if (i == n - 1) {
          grad = (u[k] - u[k - stride]) / h;
          lap = 2.0 * (u[k - stride] - u[k]) / (h * h);
        } else {
          grad = (u[k + stride] - u[k - stride]) / (2.0 * h);
          lap = (u[k + stride] - 2.0 * u[k] + u[k - stride]) / (h * h);
        }
        const double b = model.zero_drift() ? 0.0 : node_b[a][k];
        rhs += b * grad + model.nu * lap;
      }
      next[k] = u[k] + dt * rhs;
    }
    u.values().swap(next);
  }
  if (diag) *diag = {substeps, dt};
  return u;
}

Model stationary_drift(const ScalarField& rho, double nu) {
  rho.require_finite("stationary_drift");
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (!(rho[k] > 0.0)) throw InvalidInput("stationary_drift: density must be positive");
  // b = nu grad(rho)/rho built from the multilinear interpolant of rho
  // itself; sampled at a face midpoint this gives exactly the zero-flux
  // drift of the conservative forward scheme, so the density is a
  // discrete stationary state, not just an O(h^2) one.
  auto rho_vals = std::make_shared<std::vector<double>>(rho.values());
  const Grid g = rho.grid();
  const double nu_c = nu;
  Model m;
  m.nu = nu;
  m.dim = g.dim();
  m.drift = [rho_vals, g, nu_c](const Vec3& x) {
    const double r = interpolate_values(g, *rho_vals, x);
    Vec3 b;
    for (int a = 0; a < g.dim(); ++a)
      b[a] = nu_c * interpolate_derivative(g, *rho_vals, x, a) / r;
    return b;
  };
  return m;
}

void TransitionDensity::validate() const {
  for (const auto& kern : kernels) {
    double mass = 0.0;
    for (std::size_t k = 0; k < kern.size(); ++k) {
      if (kern[k] < -1e-12) throw InvalidInput("TransitionDensity: negative kernel value");
      mass += kern[k];
    }
    mass *= grid.cell_volume();
    if (std::abs(mass - 1.0) > 1e-6)
      throw InvalidInput("TransitionDensity: kernel mass deviates from 1");
  }
}

TransitionDensity transition_density(const Model& model, const Grid& grid,
                                     const std::vector<std::size_t>& sources, double t) {
  model.validate();
  TransitionDensity td;
  td.grid = grid;
  td.elapsed = t;
  td.source_nodes = sources;
  ForwardWorkspace ws(model, grid);
  const double inv_cell = 1.0 / grid.cell_volume();
  for (std::size_t src : sources) {
    ScalarField p(grid);
    p[src] = inv_cell;
    evolve_forward(ws, model.nu, p.values(), t, nullptr);
    td.kernels.push_back(std::move(p));
  }
  return td;
}

ForceEstimate force_expectation_mc(const Model& model, const ScalarField& potential,
                                   double tau, const Vec3& x, std::size_t paths,
                                   std::uint64_t seed, const McForceOptions& opts,
                                   int workers) {
  model.validate();
  if (!(tau > 0.0)) throw InvalidInput("force_expectation_mc: tau must be positive");
  const Grid& g = potential.grid();
  VectorField grad_v = gradient(potential);
  const int d = model.dim;

  const std::size_t m = static_cast<std::size_t>(std::ceil(opts.s_max / opts.s_step));
  const double ds = opts.s_max / static_cast<double>(m);
  const double dt = tau * ds;
  // Trapezoid weights for the e^{-s} measure, normalized to sum exactly 1
  // so a constant integrand is reproduced without truncation bias.
  std::vector<double> weight(m + 1);
  double wsum = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double trap = (j == 0 || j == m) ? 0.5 : 1.0;
    weight[j] = trap * std::exp(-static_cast<double>(j) * ds) * ds;
    wsum += weight[j];
  }
  for (double& w : weight) w /= wsum;

  const double step_sigma = std::sqrt(2.0 * model.nu * dt);
  std::vector<Vec3> per_path(paths);
  std::vector<char> discarded(paths, 0);

  parallel_for(paths, workers, [&](std::size_t p) {
    Rng rng = Rng::for_stream(seed, p);
    Vec3 pos = x;
    Vec3 acc{};
    for (std::size_t j = 0; j <= m; ++j) {
      if (!g.contains(pos)) {
        discarded[p] = 1;
        return;
      }
      for (int a = 0; a < d; ++a)
        acc[a] += weight[j] * interpolate_values(g, grad_v.component(a), pos);
      if (j == m) break;
      Vec3 b{};
      if (!model.zero_drift()) b = model.drift(pos);
      for (int a = 0; a < d; ++a) pos[a] += b[a] * dt + step_sigma * rng.gaussian();
    }
    per_path[p] = acc;
  });

  ForceEstimate est;
  Vec3 sum{};
  for (std::size_t p = 0; p < paths; ++p) {
    if (discarded[p]) {
      ++est.paths_discarded;
      continue;
    }
    ++est.paths_used;
    for (int a = 0; a < d; ++a) sum[a] += per_path[p][a];
  }
  if (est.paths_used == 0) throw InvalidInput("force_expectation_mc: every path left the grid");
  const double n = static_cast<double>(est.paths_used);
  Vec3 mean = sum / n;
  Vec3 var{};
  for (std::size_t p = 0; p < paths; ++p) {
    if (discarded[p]) continue;
    for (int a = 0; a < d; ++a) {
      const double dev = per_path[p][a] - mean[a];
      var[a] += dev * dev;
    }
  }
  for (int a = 0; a < d; ++a) {
    est.value[a] = -mean[a];
    est.std_error[a] = std::sqrt(var[a] / n / n);
  }
  est.discard_warning =
      est.paths_discarded > 0 &&
      static_cast<double>(est.paths_discarded) > 0.01 * static_cast<double>(paths);
  return est;
}

Vec3 force_expectation_kernel(const Model& model, const ScalarField& potential, double tau,
                              const Vec3& x, const KernelForceOptions& opts) {
  model.validate();
  if (!(tau > 0.0)) throw InvalidInput("force_expectation_kernel: tau must be positive");
  const Grid& g = potential.grid();
  VectorField grad_v = gradient(potential);
  const int d = model.dim;

  QuadratureRule rule = gauss_laguerre(opts.laguerre_nodes);
  // Drop far nodes (weight below e^{-s_max}) and renormalize so constants
  // integrate exactly.
  std::vector<std::pair<double, double>> nodes;
  double wsum = 0.0;
  for (int i = 0; i < opts.laguerre_nodes; ++i) {
    if (rule.nodes[i] > opts.s_max) continue;
    nodes.emplace_back(rule.nodes[i], rule.weights[i]);
    wsum += rule.weights[i];
  }
  for (auto& nw : nodes) nw.second /= wsum;

  ForwardWorkspace ws(model, g);
  // Delta at x scattered with multilinear weights: unit mass with the
  // mean position exactly at x, so off-node sample points carry no O(h)
  // placement bias.
  std::vector<double> p(g.node_count(), 0.0);
  {
    if (!g.contains(x)) throw InvalidInput("force_expectation_kernel: x outside grid");
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
      double s = (x[a] - g.lo(a)) / g.spacing(a);
      int i = static_cast<int>(s);
      if (i >= g.n(a) - 1) i = g.n(a) - 2;
      base[a] = i;
      frac[a] = s - i;
    }
    for (int corner = 0; corner < (1 << g.dim()); ++corner) {
      double w = 1.0;
      int idx[3] = {base[0], base[1], base[2]};
      for (int a = 0; a < g.dim(); ++a) {
        if (corner & (1 << a)) {
          idx[a] += 1;
          w *= frac[a];
        } else {
          w *= 1.0 - frac[a];
        }
      }
      p[g.flat(idx[0], idx[1], idx[2])] = w / g.cell_volume();
    }
  }

  Vec3 force{};
  double t_now = 0.0;
  const double cell = g.cell_volume();
  for (const auto& [s_node, w_node] : nodes) {
    const double t_target = tau * s_node;
    evolve_forward(ws, model.nu, p, t_target - t_now, nullptr);
    t_now = t_target;
    for (int a = 0; a < d; ++a) {
      double acc = 0.0;
      const std::vector<double>& gv = grad_v.component(a);
      for (std::size_t k = 0; k < p.size(); ++k) acc += gv[k] * p[k];
      force[a] -= w_node * acc * cell;
    }
  }
  return force;
}

ClosureReport gibbs_closure(const logse::Solution& sol, const logse::Problem& problem,
                            double nu, double tau, const ClosureOptions& opts) {
  const double kT = problem.thermal_energy;
  if (!(kT > 0.0)) throw InvalidInput("gibbs_closure: needs kT > 0");
  // The loop assumes D = 2 tau nu kT; a mismatched nu is allowed through
  // (sensitivity checks feed one in deliberately) but flagged.
  const double d_expected = 2.0 * tau * nu * kT;
  const bool d_consistent =
      std::abs(problem.d_coeff - d_expected) <= 1e-9 * std::max(problem.d_coeff, d_expected);

  const Grid& g = sol.density.grid();
  // Clamp the far tail so ln rho stays usable where Dirichlet walls force
  // exact zeros; paths never visit that region.
  double peak = 0.0;
  for (std::size_t k = 0; k < sol.density.size(); ++k)
    peak = std::max(peak, sol.density[k]);
  ScalarField rho_clamped = sol.density;
  for (std::size_t k = 0; k < rho_clamped.size(); ++k)
    rho_clamped[k] = std::max(rho_clamped[k], 1e-15 * peak);

  Model model = stationary_drift(rho_clamped, nu);

  ScalarField log_rho(g, sol.density.boundary());
  for (std::size_t k = 0; k < g.node_count(); ++k) log_rho[k] = std::log(rho_clamped[k]);
  VectorField grad_log = gradient(log_rho);

  std::vector<Vec3> points = opts.points;
  if (points.empty()) {
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < sol.density.size(); ++k) {
      const double x = g.point(k)[0];
      const double w = sol.density[k] * g.quad_weight(k);
      m0 += w;
      m2 += x * x * w;
    }
    const double sigma = std::sqrt(m2 / m0);
    points = {Vec3{-sigma}, Vec3{-0.5 * sigma}, Vec3{0.5 * sigma}, Vec3{sigma}};
  }

  ClosureReport report;
  report.nu = nu;
  report.tau = tau;
  report.thermal_energy = kT;
  report.d_consistent = d_consistent;

  double target_scale = 0.0;
  for (const Vec3& x : points) {
    ClosurePoint cp;
    cp.x = x;
    cp.target = kT * interpolate(grad_log, x);
    cp.kernel = force_expectation_kernel(model, problem.potential, tau, x, opts.kernel);
    ForceEstimate mc = force_expectation_mc(model, problem.potential, tau, x, opts.mc_paths,
                                            opts.mc_seed, opts.mc, opts.workers);
    cp.mc = mc.value;
    cp.mc_std_error = mc.std_error;
    report.points.push_back(cp);
    target_scale = std::max(target_scale, norm(cp.target));
  }
  for (const ClosurePoint& cp : report.points) {
    report.kernel_max_rel_dev =
        std::max(report.kernel_max_rel_dev, norm(cp.kernel - cp.target) / target_scale);
    for (int a = 0; a < g.dim(); ++a) {
      const double se = std::max(cp.mc_std_error[a], 1e-300);
      report.mc_max_sigmas =
          std::max(report.mc_max_sigmas, std::abs(cp.mc[a] - cp.target[a]) / se);
    }
  }
  return report;
}

}  // namespace sqmlab::markov
