#include "sqmlab/logse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "sqmlab/errors.hpp"
#include "sqmlab/numerics.hpp"
#include "sqmlab/periodic_index.hpp"

namespace sqmlab::logse {

namespace {

// Ghost-zero laplacian over all nodes; the Dirichlet iteration pins edge
// nodes to zero separately.
void dirichlet_laplacian(const Grid& g, const std::vector<double>& in,
                         std::vector<double>& out) {
  const int d = g.dim();
  std::fill(out.begin(), out.end(), 0.0);
  for (int a = 0; a < d; ++a) {
    const int n = g.n(a);
    const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
    const std::size_t stride = detail::axis_stride(g, a);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
      const double up = (i == n - 1) ? 0.0 : in[k + stride];
      const double dn = (i == 0) ? 0.0 : in[k - stride];
      out[k] += (up - 2.0 * in[k] + dn) * inv_h2;
    }
  }
}

bool edge_node(const Grid& g, std::size_t k) {
  int idx[3];
  g.unflatten(k, idx);
  for (int a = 0; a < g.dim(); ++a)
    if (idx[a] == 0 || idx[a] == g.n(a) - 1) return true;
  return false;
}

}  // namespace

void Problem::validate() const {
  potential.require_finite("logse::Problem");
  if (!(d_coeff > 0.0)) throw InvalidInput("logse: D must be positive");
  if (thermal_energy < 0.0) throw InvalidInput("logse: kT must be non-negative");
  if (!(tol > 0.0) || max_iter < 1) throw InvalidInput("logse: bad tolerance settings");
  if (!(damping > 0.0) || damping > 1.0) throw InvalidInput("logse: damping must be in (0,1]");
}

Solution solve(const Problem& problem) {
  problem.validate();
  const ScalarField& V_field = problem.potential;
  const Grid& g = V_field.grid();
  const Boundary bc = V_field.boundary();
  const double D = problem.d_coeff;
  const double kT = problem.thermal_energy;
  const bool dirichlet = bc == Boundary::dirichlet;

  // Working representation: all nodes for Dirichlet (edges pinned to
  // zero); the seam-free reduced set for periodic, where the wrap
  // laplacian is symmetric.
  std::unique_ptr<detail::PeriodicIndex> pidx;
  if (!dirichlet) pidx = std::make_unique<detail::PeriodicIndex>(g);
  std::vector<double> V;
  std::vector<double> weight;
  std::vector<char> edge;
  if (dirichlet) {
    V.assign(V_field.values().begin(), V_field.values().end());
    weight.resize(V.size());
    edge.resize(V.size());
    for (std::size_t k = 0; k < V.size(); ++k) {
      weight[k] = g.quad_weight(k);
      edge[k] = edge_node(g, k) ? 1 : 0;
    }
  } else {
    pidx->gather(V_field.values(), V);
    weight.assign(V.size(), g.cell_volume());
    edge.assign(V.size(), 0);
  }
  const std::size_t total = V.size();

  auto normalize_density = [&](std::vector<double>& rho) {
    double mass = 0.0;
    for (std::size_t k = 0; k < total; ++k) mass += rho[k] * weight[k];
    if (!(mass > 0.0)) throw InvalidInput("logse: density lost all mass");
    const double inv = 1.0 / mass;
    for (double& r : rho) r *= inv;
  };
  auto apply_lap = [&](const std::vector<double>& in, std::vector<double>& out) {
    if (dirichlet)
      dirichlet_laplacian(g, in, out);
    else
      pidx->laplacian(in, out);
  };

  // Energy scale for the auto pseudo-step.
  double v_min = V[0], v_mean = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    v_min = std::min(v_min, V[k]);
    v_mean += V[k];
  }
  v_mean /= static_cast<double>(total);
  double l_min = g.extent(0);
  for (int a = 1; a < g.dim(); ++a) l_min = std::min(l_min, g.extent(a));
  const double gap_scale =
      D * (M_PI / l_min) * (M_PI / l_min) + (v_mean - v_min) + kT;
  // The lagged log term feeds back with linearized factor 1 - 2 b dt kT
  // near the potential minimum; dt kT must stay below 1/(2 b) or the
  // sweep-to-sweep map loses contraction there.
  double dt = 10.0 / gap_scale;
  if (kT > 0.0) dt = std::min(dt, 1.0 / (2.0 * problem.damping * kT));
  if (problem.pseudo_step > 0.0) dt = problem.pseudo_step;

  // Initial iterate: Boltzmann-like profile in V, zero on Dirichlet edges.
  std::vector<double> psi(total);
  const double w0 = std::max(v_mean - v_min, gap_scale * 1e-3);
  for (std::size_t k = 0; k < total; ++k) {
    psi[k] = edge[k] ? 0.0 : std::exp(-0.5 * (V[k] - v_min) / w0);
  }

  std::vector<double> rho(total), w(total), lap(total), hpsi(total), rhs(total);
  for (std::size_t k = 0; k < total; ++k) rho[k] = psi[k] * psi[k];
  normalize_density(rho);
  for (std::size_t k = 0; k < total; ++k) psi[k] = std::sqrt(rho[k]);

  // 1D Dirichlet solves use the Thomas algorithm on interior nodes;
  // everything else goes through conjugate gradient.
  const bool use_thomas = g.dim() == 1 && dirichlet;
  const double inv_h2 = 1.0 / (g.spacing(0) * g.spacing(0));

  std::function<void(const std::vector<double>&, std::vector<double>&)> apply_op;
  std::vector<double> x_cg;

  double lambda = 0.0, residual = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  int oscillating = 0;
  int iter = 0;

  for (iter = 1; iter <= problem.max_iter; ++iter) {
    // Lagged potential including the log nonlinearity, shifted so the
    // backward-Euler operator stays positive definite.
    double w_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < total; ++k) {
      w[k] = V[k] + kT * std::log(std::max(rho[k], density_floor));
      if (!edge[k]) w_min = std::min(w_min, w[k]);
    }
    for (std::size_t k = 0; k < total; ++k) w[k] -= w_min;

    std::vector<double> psi_new(total, 0.0);
    if (use_thomas) {
      const int n = g.n(0);
      const int m = n - 2;  // interior unknowns
      std::vector<double> sub(m - 1, -dt * D * inv_h2), sup(m - 1, -dt * D * inv_h2);
      std::vector<double> diag(m), rhs1(m);
      for (int i = 0; i < m; ++i) {
        diag[i] = 1.0 + dt * (2.0 * D * inv_h2 + w[i + 1]);
        rhs1[i] = psi[i + 1];
      }
      solve_tridiagonal(sub, diag, sup, rhs1);
      for (int i = 0; i < m; ++i) psi_new[i + 1] = rhs1[i];
    } else {
      apply_op = [&](const std::vector<double>& in, std::vector<double>& out) {
        apply_lap(in, lap);
        for (std::size_t k = 0; k < total; ++k)
          out[k] = in[k] + dt * (-D * lap[k] + w[k] * in[k]);
        if (dirichlet)
          for (std::size_t k = 0; k < total; ++k)
            if (edge[k]) out[k] = in[k];
      };
      rhs = psi;
      if (dirichlet)
        for (std::size_t k = 0; k < total; ++k)
          if (edge[k]) rhs[k] = 0.0;
      x_cg = psi;
      conjugate_gradient<double>(apply_op, rhs, x_cg, 1e-13, 10000);
      psi_new = x_cg;
    }

    // Renormalize, then damp the density update.
    for (std::size_t k = 0; k < total; ++k) psi_new[k] = std::max(psi_new[k], 0.0);
    std::vector<double> rho_new(total);
    for (std::size_t k = 0; k < total; ++k) rho_new[k] = psi_new[k] * psi_new[k];
    normalize_density(rho_new);
    for (std::size_t k = 0; k < total; ++k)
      rho[k] = (1.0 - problem.damping) * rho[k] + problem.damping * rho_new[k];
    normalize_density(rho);
    for (std::size_t k = 0; k < total; ++k) psi[k] = std::sqrt(rho[k]);

    // Rayleigh quotient and eigen-residual of the current iterate.
    apply_lap(psi, lap);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      if (edge[k]) {
        hpsi[k] = 0.0;
        continue;
      }
      hpsi[k] = -D * lap[k] +
                (V[k] + kT * std::log(std::max(rho[k], density_floor))) * psi[k];
      num += psi[k] * hpsi[k] * weight[k];
      den += psi[k] * psi[k] * weight[k];
    }
    lambda = num / den;
    double r2 = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      if (edge[k]) continue;
      const double r = hpsi[k] - lambda * psi[k];
      r2 += r * r * weight[k];
    }
    residual = std::sqrt(r2 / den);

    if (residual < problem.tol) break;
    if (residual < best_residual) {
      best_residual = residual;
      oscillating = 0;
    } else if (residual > 5.0 * best_residual && iter > 50) {
      if (++oscillating > 20)
        throw DiagnosticError(
            "logse: residual oscillation detected; the log term appears to "
            "overwhelm the potential at this kT");
    }
  }

  if (residual >= problem.tol)
    throw ConvergenceError("logse: no convergence within max iterations", residual,
                           problem.max_iter);

  Solution sol;
  sol.density = ScalarField(g, bc);
  sol.log_half_density = ScalarField(g, bc);
  if (dirichlet) {
    for (std::size_t k = 0; k < total; ++k) sol.density[k] = rho[k];
  } else {
    pidx->scatter(rho, g, sol.density.values());
  }
  for (std::size_t k = 0; k < g.node_count(); ++k)
    sol.log_half_density[k] =
        0.5 * std::log(std::max(sol.density[k], density_floor));
  sol.lambda = lambda;
  sol.iterations = iter;
  sol.residual = residual;
  return sol;
}

double fixed_point_residual(const Solution& sol, const Problem& problem) {
  if (!(problem.thermal_energy > 0.0))
    throw InvalidInput("fixed_point_residual: needs kT > 0");
  const ScalarField& rho = sol.density;
  const Grid& g = rho.grid();
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (rho[k] < 0.0) throw InvalidInput("fixed_point_residual: negative density");

  ScalarField sqrt_rho(g, rho.boundary());
  for (std::size_t k = 0; k < rho.size(); ++k) sqrt_rho[k] = std::sqrt(rho[k]);
  ScalarField lap = laplacian(sqrt_rho);

  // rho_fp = exp[-(V - D lap(sqrt rho)/sqrt rho)/kT], normalized; the
  // normalization absorbs the c0 constant.
  ScalarField rho_fp(g, rho.boundary());
  double arg_max = -std::numeric_limits<double>::infinity();
  std::vector<double> arg(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double s = std::max(sqrt_rho[k], std::sqrt(density_floor));
    arg[k] = -(problem.potential[k] - problem.d_coeff * lap[k] / s) / problem.thermal_energy;
    arg_max = std::max(arg_max, arg[k]);
  }
  for (std::size_t k = 0; k < rho.size(); ++k) rho_fp[k] = std::exp(arg[k] - arg_max);
  double mass = integrate(rho_fp);
  for (std::size_t k = 0; k < rho.size(); ++k) rho_fp[k] /= mass;

  double worst = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k)
    worst = std::max(worst, std::abs(rho[k] - rho_fp[k]));
  return worst;
}

VectorField effective_force(const Solution& sol, const Problem& problem) {
  const ScalarField& rho = sol.density;
  const Grid& g = rho.grid();
  ScalarField sqrt_rho(g, rho.boundary());
  for (std::size_t k = 0; k < rho.size(); ++k)
    sqrt_rho[k] = std::sqrt(std::max(rho[k], density_floor));
  ScalarField lap = laplacian(sqrt_rho);
  ScalarField arg(g, rho.boundary());
  for (std::size_t k = 0; k < rho.size(); ++k)
    arg[k] = problem.potential[k] - problem.d_coeff * lap[k] / sqrt_rho[k];
  VectorField force = gradient(arg);
  for (int a = 0; a < g.dim(); ++a)
    for (double& v : force.component(a)) v = -v;
  return force;
}

ScalarField gibbs_limit(const ScalarField& potential, double thermal_energy) {
  if (!(thermal_energy > 0.0)) throw InvalidInput("gibbs_limit: needs kT > 0");
  potential.require_finite("gibbs_limit");
  const Grid& g = potential.grid();
  ScalarField rho(g, potential.boundary());
  double v_min = potential[0];
  for (std::size_t k = 0; k < potential.size(); ++k) v_min = std::min(v_min, potential[k]);
  for (std::size_t k = 0; k < potential.size(); ++k)
    rho[k] = std::exp(-(potential[k] - v_min) / thermal_energy);
  const double mass = integrate(rho);
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] /= mass;
  return rho;
}

}  // namespace sqmlab::logse
