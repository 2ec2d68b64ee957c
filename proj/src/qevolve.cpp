#include "sqmlab/qevolve.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "sqmlab/errors.hpp"
#include "sqmlab/numerics.hpp"
#include "sqmlab/periodic_index.hpp"

namespace sqmlab::qevolve {

namespace {

using cplx = std::complex<double>;

constexpr double density_floor = 1e-300;

// Ghost-zero Dirichlet laplacian over all nodes (symmetric).
void dirichlet_laplacian(const Grid& g, const std::vector<cplx>& in,
                         std::vector<cplx>& out) {
  std::fill(out.begin(), out.end(), cplx{});
  for (int a = 0; a < g.dim(); ++a) {
    const int n = g.n(a);
    const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
    const std::size_t stride = detail::axis_stride(g, a);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const int i = static_cast<int>((k / stride) % static_cast<std::size_t>(n));
      const cplx up = (i == n - 1) ? cplx{} : in[k + stride];
      const cplx dn = (i == 0) ? cplx{} : in[k - stride];
      out[k] += (up - 2.0 * in[k] + dn) * inv_h2;
    }
  }
}

// Works on the full node set for Dirichlet fields and on the reduced
// (seam-free) set for periodic fields, where the wrap stencil is exactly
// symmetric; Crank-Nicolson then conserves the discrete norm.
struct Stepper {
  const Grid& grid;
  Boundary bc;
  double kinetic;  // hbar^2 / 2m
  double hbar;
  bool thomas;  // 1D Dirichlet fast path
  const detail::PeriodicIndex* pidx = nullptr;

  std::vector<cplx> h_buf, hh_buf;

  Stepper(const Grid& g, Boundary b, double kin, double hb,
          const detail::PeriodicIndex* pi)
      : grid(g), bc(b), kinetic(kin), hbar(hb),
        thomas(g.dim() == 1 && b == Boundary::dirichlet), pidx(pi) {
    const std::size_t m = pidx ? pidx->count : g.node_count();
    h_buf.resize(m);
    hh_buf.resize(m);
  }

  void apply_h(const std::vector<double>& w, const std::vector<cplx>& in,
               std::vector<cplx>& out) {
    if (pidx)
      pidx->laplacian(in, out);
    else
      dirichlet_laplacian(grid, in, out);
    for (std::size_t k = 0; k < in.size(); ++k)
      out[k] = -kinetic * out[k] + w[k] * in[k];
  }

  // One Crank-Nicolson step with the (possibly nonlinearly augmented)
  // potential w frozen over the step.
  void step(std::vector<cplx>& psi, const std::vector<double>& w, double dt) {
    const double alpha = dt / (2.0 * hbar);
    const std::size_t total = psi.size();
    if (thomas) {
      const int n = grid.n(0);
      const double inv_h2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
      const cplx off = cplx(0.0, alpha) * (-kinetic * inv_h2);
      std::vector<cplx> sub(n - 1, off), sup(n - 1, off), diag(n), rhs(n);
      apply_h(w, psi, h_buf);
      for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + cplx(0.0, alpha) * (2.0 * kinetic * inv_h2 + w[i]);
        rhs[i] = psi[i] - cplx(0.0, alpha) * h_buf[i];
      }
      solve_tridiagonal(sub, diag, sup, rhs);
      psi = rhs;
      return;
    }
    // CGNR: (I + a^2 H^2) x = (I - i a H) rhs with rhs = (I - i a H) psi.
    apply_h(w, psi, h_buf);
    std::vector<cplx> rhs(total);
    for (std::size_t k = 0; k < total; ++k) rhs[k] = psi[k] - cplx(0.0, alpha) * h_buf[k];
    apply_h(w, rhs, h_buf);
    std::vector<cplx> b(total);
    for (std::size_t k = 0; k < total; ++k) b[k] = rhs[k] - cplx(0.0, alpha) * h_buf[k];
    std::function<void(const std::vector<cplx>&, std::vector<cplx>&)> apply_n =
        [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
          apply_h(w, in, h_buf);
          apply_h(w, h_buf, hh_buf);
          for (std::size_t k = 0; k < in.size(); ++k)
            out[k] = in[k] + alpha * alpha * hh_buf[k];
        };
    conjugate_gradient<cplx>(apply_n, b, psi, 1e-13, 2000);
  }
};

std::vector<double> log_potential_values(const std::vector<double>& v, double kT,
                                         const std::vector<cplx>& psi) {
  std::vector<double> w(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k)
    w[k] = v[k] + kT * std::log(std::max(std::norm(psi[k]), density_floor));
  return w;
}

WaveFunction evolve_impl(const WaveFunction& wf, const ScalarField& potential,
                         double thermal_energy, double t, double dt) {
  wf.validate();
  potential.require_finite("evolve");
  if (potential.grid() != wf.psi.grid()) throw InvalidInput("evolve: grid mismatch");
  if (!(dt > 0.0) || t < 0.0) throw InvalidInput("evolve: need dt > 0, t >= 0");

  WaveFunction out = wf;
  const bool periodic = wf.psi.boundary() == Boundary::periodic;
  std::unique_ptr<detail::PeriodicIndex> pidx;
  if (periodic) pidx = std::make_unique<detail::PeriodicIndex>(wf.psi.grid());

  Stepper stepper(wf.psi.grid(), wf.psi.boundary(), wf.hbar * wf.hbar / (2.0 * wf.mass),
                  wf.hbar, pidx.get());

  // Working representation: full nodes for Dirichlet, reduced for periodic.
  std::vector<cplx> psi;
  std::vector<double> v_work;
  if (periodic) {
    pidx->gather(out.psi.values(), psi);
    pidx->gather(potential.values(), v_work);
  } else {
    psi = out.psi.values();
    v_work.assign(potential.values().begin(), potential.values().end());
  }

  const bool nonlinear = thermal_energy != 0.0;
  double remaining = t;
  while (remaining > 0.0) {
    const double step_dt = std::min(dt, remaining);
    if (!nonlinear) {
      stepper.step(psi, v_work, step_dt);
    } else {
      // Predictor with the entry-value log term, corrector with the
      // half-step density.
      std::vector<cplx> predictor = psi;
      stepper.step(predictor, log_potential_values(v_work, thermal_energy, psi), step_dt);
      std::vector<cplx> half(psi.size());
      for (std::size_t k = 0; k < psi.size(); ++k) half[k] = 0.5 * (psi[k] + predictor[k]);
      stepper.step(psi, log_potential_values(v_work, thermal_energy, half), step_dt);
    }
    remaining -= step_dt;
  }
  if (periodic)
    pidx->scatter(psi, wf.psi.grid(), out.psi.values());
  else
    out.psi.values() = std::move(psi);
  out.time = wf.time + t;
  return out;
}

}  // namespace

double WaveFunction::norm_sq() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k)
    acc += std::norm(psi[k]) * psi.grid().quad_weight(k);
  return acc;
}

void WaveFunction::validate() const {
  psi.require_finite("WaveFunction");
  if (mass <= 0.0 || hbar <= 0.0) throw InvalidInput("WaveFunction: mass, hbar must be > 0");
  if (std::abs(norm_sq() - 1.0) > 1e-8)
    throw InvalidInput("WaveFunction: norm deviates from 1 by more than 1e-8");
  const Grid& g = psi.grid();
  double peak = 0.0, edge = 0.0;
  int idx[3];
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double a = std::abs(psi[k]);
    peak = std::max(peak, a);
    g.unflatten(k, idx);
    for (int ax = 0; ax < g.dim(); ++ax)
      if (idx[ax] == 0 || idx[ax] == g.n(ax) - 1) {
        edge = std::max(edge, a);
        break;
      }
  }
  if (psi.boundary() == Boundary::dirichlet && edge > 1e-8 * peak)
    throw InvalidInput("WaveFunction: boundary amplitude exceeds 1e-8 of the peak");
}

WaveFunction make_wave_function(ComplexField psi, double mass, double charge, double hbar,
                                double time) {
  WaveFunction wf{std::move(psi), mass, charge, hbar, time};
  const double n = std::sqrt(wf.norm_sq());
  if (!(n > 0.0)) throw InvalidInput("make_wave_function: zero norm");
  for (std::size_t k = 0; k < wf.psi.size(); ++k) wf.psi[k] /= n;
  return wf;
}

WaveFunction evolve(const WaveFunction& wf, const ScalarField& potential, double t,
                    double dt) {
  return evolve_impl(wf, potential, 0.0, t, dt);
}

WaveFunction evolve_log(const WaveFunction& wf, const ScalarField& potential,
                        double thermal_energy, double t, double dt) {
  return evolve_impl(wf, potential, thermal_energy, t, dt);
}

CurrentDensity current(const WaveFunction& wf) {
  wf.validate();
  const Grid& g = wf.psi.grid();
  CurrentDensity cd;
  cd.time = wf.time;
  cd.charge_density = ScalarField(g, wf.psi.boundary());
  for (std::size_t k = 0; k < wf.psi.size(); ++k)
    cd.charge_density[k] = wf.charge * std::norm(wf.psi[k]);
  cd.current = VectorField(g, wf.psi.boundary());
  const double scale = wf.charge * wf.hbar / wf.mass;
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField dpsi = axis_derivative(wf.psi, a);
    for (std::size_t k = 0; k < wf.psi.size(); ++k)
      cd.current.component(a)[k] = scale * std::imag(std::conj(wf.psi[k]) * dpsi[k]);
  }
  return cd;
}

Vec3 expect_position(const WaveFunction& wf) {
  const Grid& g = wf.psi.grid();
  Vec3 acc{};
  double mass = 0.0;
  for (std::size_t k = 0; k < wf.psi.size(); ++k) {
    const double w = std::norm(wf.psi[k]) * g.quad_weight(k);
    mass += w;
    const Vec3 p = g.point(k);
    for (int a = 0; a < g.dim(); ++a) acc[a] += p[a] * w;
  }
  return acc / mass;
}

Vec3 expect_acceleration(const WaveFunction& wf, const ScalarField& potential) {
  const Grid& g = wf.psi.grid();
  VectorField grad_v = gradient(potential);
  Vec3 acc{};
  for (std::size_t k = 0; k < wf.psi.size(); ++k) {
    const double w = std::norm(wf.psi[k]) * g.quad_weight(k);
    for (int a = 0; a < g.dim(); ++a) acc[a] -= grad_v.component(a)[k] / wf.mass * w;
  }
  return acc;
}

double expect_acceleration_sq(const WaveFunction& wf, const ScalarField& potential) {
  const Grid& g = wf.psi.grid();
  VectorField grad_v = gradient(potential);
  double acc = 0.0;
  for (std::size_t k = 0; k < wf.psi.size(); ++k) {
    const double w = std::norm(wf.psi[k]) * g.quad_weight(k);
    double a2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double ga = grad_v.component(a)[k] / wf.mass;
      a2 += ga * ga;
    }
    acc += a2 * w;
  }
  return acc;
}

double energy(const WaveFunction& wf, const ScalarField& potential) {
  const Grid& g = wf.psi.grid();
  std::vector<cplx> lap(wf.psi.size());
  if (wf.psi.boundary() == Boundary::periodic) {
    lap = laplacian(wf.psi).values();  // seam-consistent wrap stencil
  } else {
    dirichlet_laplacian(g, wf.psi.values(), lap);
  }
  const double kin = wf.hbar * wf.hbar / (2.0 * wf.mass);
  double acc = 0.0;
  for (std::size_t k = 0; k < wf.psi.size(); ++k) {
    const cplx h = -kin * lap[k] + potential[k] * wf.psi[k];
    acc += (std::conj(wf.psi[k]) * h).real() * g.quad_weight(k);
  }
  return acc;
}

}  // namespace sqmlab::qevolve
