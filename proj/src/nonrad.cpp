#include "sqmlab/nonrad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "sqmlab/errors.hpp"
#include "sqmlab/field_io.hpp"
#include "sqmlab/field_ops.hpp"
#include "sqmlab/momentum.hpp"
#include "sqmlab/numerics.hpp"
#include "sqmlab/parallel.hpp"

namespace sqmlab::nonrad {

namespace {

double smootherstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

}  // namespace

double FourCurrent::envelope(double t) const {
  if (t < t_start || t > t_end()) return 0.0;
  if (taper_width <= 0.0) return 1.0;
  const double up = smootherstep((t - t_start) / taper_width);
  const double down = smootherstep((t_end() - t) / taper_width);
  return std::min(up, down);
}

double FourCurrent::charge(int slice) const {
  // Trapezoid weights count periodic seam planes once.
  double q = 0.0;
  for (std::size_t k = 0; k < rho[slice].size(); ++k)
    q += rho[slice][k] * grid.quad_weight(k);
  return q;
}

double FourCurrent::charge_drift() const {
  double q0 = charge(0), worst = 0.0, scale = 0.0;
  for (int s = 0; s < nt; ++s) {
    worst = std::max(worst, std::abs(charge(s) - q0));
    double abs_q = 0.0;
    for (std::size_t k = 0; k < rho[s].size(); ++k)
      abs_q += std::abs(rho[s][k]) * grid.quad_weight(k);
    scale = std::max(scale, abs_q);
  }
  return scale > 0.0 ? worst / scale : worst;
}

double FourCurrent::continuity_residual() const {
  const int mid = nt / 2;
  if (mid < 1 || mid + 1 >= nt) return 0.0;
  ScalarField drho(grid);
  for (std::size_t k = 0; k < drho.size(); ++k)
    drho[k] = (rho[mid + 1][k] - rho[mid - 1][k]) / (2.0 * dt);
  VectorField j(grid);
  for (int a = 0; a < grid.dim(); ++a) j.component(a) = cur[a][mid];
  ScalarField div_j = divergence(j);
  double res = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < drho.size(); ++k) {
    const double r = drho[k] + div_j[k];
    res += r * r;
    scale += drho[k] * drho[k];
  }
  return scale > 0.0 ? std::sqrt(res / scale) : std::sqrt(res);
}

void FourCurrent::compute_support_radius(double threshold) {
  double peak = 0.0;
  for (int s = 0; s < nt; ++s) {
    for (double r : rho[s]) peak = std::max(peak, std::abs(r));
    for (int a = 0; a < grid.dim(); ++a)
      for (double j : cur[a][s]) peak = std::max(peak, std::abs(j) / light_speed);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    double amp = 0.0;
    for (int s = 0; s < nt; ++s) {
      amp = std::max(amp, std::abs(rho[s][k]));
      for (int a = 0; a < grid.dim(); ++a)
        amp = std::max(amp, std::abs(cur[a][s][k]) / light_speed);
    }
    if (amp > threshold * peak) worst = std::max(worst, norm(grid.point(k)));
  }
  support_radius = 1.1 * worst;
}

void FourCurrent::validate() const {
  if (nt < 2 || dt <= 0.0) throw InvalidInput("FourCurrent: empty window");
  if (light_speed <= 0.0) throw InvalidInput("FourCurrent: light speed not set");
  if (charge_drift() > 1e-6)
    throw InvalidInput("FourCurrent: charge not conserved over the window");
}

FourCurrent four_current_from_evolution(const qevolve::WaveFunction& psi0,
                                        const ScalarField& potential, double light_speed,
                                        double window, double dt, double taper_width) {
  FourCurrent fc;
  fc.grid = psi0.psi.grid();
  fc.light_speed = light_speed;
  fc.t_start = psi0.time;
  fc.dt = dt;
  fc.nt = static_cast<int>(std::llround(window / dt)) + 1;
  fc.taper_width = taper_width;
  for (int a = 0; a < fc.grid.dim(); ++a) fc.cur[a].reserve(fc.nt);
  fc.rho.reserve(fc.nt);

  qevolve::WaveFunction state = psi0;
  for (int s = 0; s < fc.nt; ++s) {
    if (s > 0) state = qevolve::evolve(state, potential, dt, dt);
    auto cd = qevolve::current(state);
    fc.rho.push_back(std::move(cd.charge_density.values()));
    for (int a = 0; a < fc.grid.dim(); ++a)
      fc.cur[a].push_back(std::move(cd.current.component(a)));
    for (int a = fc.grid.dim(); a < 3; ++a)
      fc.cur[a].push_back(std::vector<double>(fc.grid.node_count(), 0.0));
  }
  fc.compute_support_radius();
  return fc;
}

FourCurrent oscillating_dipole_source(const Grid& grid, double light_speed, double d0,
                                      double omega, double sigma, double t_start,
                                      double window, double dt, double taper_width) {
  if (grid.dim() != 3) throw InvalidInput("oscillating_dipole_source: needs a 3D grid");
  FourCurrent fc;
  fc.grid = grid;
  fc.light_speed = light_speed;
  fc.t_start = t_start;
  fc.dt = dt;
  fc.nt = static_cast<int>(std::llround(window / dt)) + 1;
  fc.taper_width = taper_width;

  const double norm3 = 1.0 / std::pow(2.0 * M_PI * sigma * sigma, 1.5);
  std::vector<double> blob(grid.node_count()), dblob_dz(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const Vec3 p = grid.point(k);
    const double g = norm3 * std::exp(-norm_sq(p) / (2.0 * sigma * sigma));
    blob[k] = g;
    dblob_dz[k] = -p[2] / (sigma * sigma) * g;
  }
  for (int s = 0; s < fc.nt; ++s) {
    const double t = s * dt;  // relative to window start
    const double d = d0 * std::sin(omega * t);
    const double d_dot = d0 * omega * std::cos(omega * t);
    std::vector<double> rho(grid.node_count()), jz(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      rho[k] = -d * dblob_dz[k];
      jz[k] = d_dot * blob[k];
    }
    fc.rho.push_back(std::move(rho));
    fc.cur[0].push_back(std::vector<double>(grid.node_count(), 0.0));
    fc.cur[1].push_back(std::vector<double>(grid.node_count(), 0.0));
    fc.cur[2].push_back(std::move(jz));
  }
  fc.compute_support_radius();
  return fc;
}

FourCurrent static_blob_source(const Grid& grid, double light_speed, double q,
                               double sigma, double t_start, double window, double dt,
                               double taper_width) {
  if (grid.dim() != 3) throw InvalidInput("static_blob_source: needs a 3D grid");
  FourCurrent fc;
  fc.grid = grid;
  fc.light_speed = light_speed;
  fc.t_start = t_start;
  fc.dt = dt;
  fc.nt = static_cast<int>(std::llround(window / dt)) + 1;
  fc.taper_width = taper_width;
  const double norm3 = q / std::pow(2.0 * M_PI * sigma * sigma, 1.5);
  std::vector<double> blob(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    blob[k] = norm3 * std::exp(-norm_sq(grid.point(k)) / (2.0 * sigma * sigma));
  for (int s = 0; s < fc.nt; ++s) {
    fc.rho.push_back(blob);
    for (int a = 0; a < 3; ++a)
      fc.cur[a].push_back(std::vector<double>(grid.node_count(), 0.0));
  }
  fc.compute_support_radius();
  return fc;
}

namespace {

// Precomputed active-node sweep over the retarded integrals.
struct Evaluator {
  const FourCurrent& src;
  std::vector<std::size_t> nodes;
  std::vector<double> px, py, pz, wq;
  double cell;

  explicit Evaluator(const FourCurrent& s) : src(s), cell(s.grid.cell_volume()) {
    // Keep nodes that ever carry meaningful charge or current.
    double peak = 0.0;
    const std::size_t total = s.grid.node_count();
    std::vector<double> amp(total, 0.0);
    for (int t = 0; t < s.nt; ++t)
      for (std::size_t k = 0; k < total; ++k) {
        double a = std::abs(s.rho[t][k]);
        for (int ax = 0; ax < 3; ++ax) a += std::abs(s.cur[ax][t][k]) / s.light_speed;
        amp[k] = std::max(amp[k], a);
        peak = std::max(peak, a);
      }
    for (std::size_t k = 0; k < total; ++k) {
      if (amp[k] > 1e-12 * peak) {
        nodes.push_back(k);
        const Vec3 p = s.grid.point(k);
        px.push_back(p[0]);
        py.push_back(p[1]);
        pz.push_back(p[2]);
        wq.push_back(s.grid.quad_weight(k));
      }
    }
  }

  PotentialSample potentials(const Vec3& x, double t) const {
    const double c = src.light_speed;
    const double inv_dt = 1.0 / src.dt;
    double phi = 0.0, ax = 0.0, ay = 0.0, az = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dx = x[0] - px[i];
      const double dy = x[1] - py[i];
      const double dz = x[2] - pz[i];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      const double t_ret = t - r / c;
      if (t_ret < src.t_start || t_ret > src.t_end()) continue;
      const double env = src.envelope(t_ret);
      if (env == 0.0) continue;
      double s = (t_ret - src.t_start) * inv_dt;
      int i0 = static_cast<int>(s);
      if (i0 >= src.nt - 1) i0 = src.nt - 2;
      const double f = s - i0;
      const std::size_t k = nodes[i];
      const double w = wq[i] * env / std::max(r, 1e-3 * std::cbrt(cell));
      phi += w * ((1.0 - f) * src.rho[i0][k] + f * src.rho[i0 + 1][k]);
      ax += w * ((1.0 - f) * src.cur[0][i0][k] + f * src.cur[0][i0 + 1][k]);
      ay += w * ((1.0 - f) * src.cur[1][i0][k] + f * src.cur[1][i0 + 1][k]);
      az += w * ((1.0 - f) * src.cur[2][i0][k] + f * src.cur[2][i0 + 1][k]);
    }
    PotentialSample out;
    out.phi = phi;
    out.a = Vec3{ax, ay, az} / c;
    return out;
  }

  EMSample fields(const Vec3& x, double t, double h_f, double dt_f) const {
    PotentialSample plus[3], minus[3];
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = x, xm = x;
      xp[a] += h_f;
      xm[a] -= h_f;
      plus[a] = potentials(xp, t);
      minus[a] = potentials(xm, t);
    }
    const PotentialSample later = potentials(x, t + dt_f);
    const PotentialSample earlier = potentials(x, t - dt_f);

    EMSample out;
    const double c = src.light_speed;
    for (int a = 0; a < 3; ++a) {
      const double grad_phi = (plus[a].phi - minus[a].phi) / (2.0 * h_f);
      const double da_dt = (later.a[a] - earlier.a[a]) / (2.0 * dt_f);
      out.e[a] = -grad_phi - da_dt / c;
    }
    // curl A
    out.b[0] = (plus[1].a[2] - minus[1].a[2]) / (2.0 * h_f) -
               (plus[2].a[1] - minus[2].a[1]) / (2.0 * h_f);
    out.b[1] = (plus[2].a[0] - minus[2].a[0]) / (2.0 * h_f) -
               (plus[0].a[2] - minus[0].a[2]) / (2.0 * h_f);
    out.b[2] = (plus[0].a[1] - minus[0].a[1]) / (2.0 * h_f) -
               (plus[1].a[0] - minus[1].a[0]) / (2.0 * h_f);
    return out;
  }
};

}  // namespace

PotentialSample retarded_potentials(const FourCurrent& src, const Vec3& x, double t) {
  return Evaluator(src).potentials(x, t);
}

EMSample fields_at(const FourCurrent& src, const Vec3& x, double t, double h_f,
                   double dt_f) {
  return Evaluator(src).fields(x, t, h_f, dt_f);
}

FarFieldProbe FarFieldProbe::product_gauss(double radius, int n_theta, int n_phi,
                                           std::vector<double> times) {
  FarFieldProbe probe;
  probe.radius = radius;
  probe.times = std::move(times);
  QuadratureRule gl = gauss_legendre(n_theta);
  const double dphi = 2.0 * M_PI / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double cos_t = gl.nodes[i];
    const double sin_t = std::sqrt(1.0 - cos_t * cos_t);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      probe.directions.push_back(
          Vec3{sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t});
      probe.weights.push_back(gl.weights[i] * dphi * radius * radius);
    }
  }
  return probe;
}

void FarFieldProbe::validate(double source_circumradius, double factor) const {
  if (factor < 4.0) throw InvalidInput("FarFieldProbe: factor must be >= 4");
  if (radius < factor * source_circumradius)
    throw InvalidInput("FarFieldProbe: radius below the far-field factor");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 4.0 * M_PI * radius * radius) > 1e-9 * 4.0 * M_PI * radius * radius)
    throw InvalidInput("FarFieldProbe: weights do not sum to the sphere area");
}

namespace {

// Mean outward power and per-(node, time) fluxes in one pass.
std::vector<double> sphere_fluxes(const FourCurrent& src, const FarFieldProbe& probe,
                                  double h_f, double dt_f, int workers) {
  const Evaluator eval(src);
  const std::size_t nn = probe.directions.size();
  const std::size_t ntt = probe.times.size();
  std::vector<double> flux(nn * ntt, 0.0);  // weighted S.n per node-time
  const double c = src.light_speed;
  parallel_for(nn, workers, [&](std::size_t i) {
    const Vec3 x = probe.radius * probe.directions[i];
    for (std::size_t j = 0; j < ntt; ++j) {
      const EMSample em = eval.fields(x, probe.times[j], h_f, dt_f);
      const Vec3 s = cross(em.e, em.b) * (c / (4.0 * M_PI));
      flux[i * ntt + j] = dot(s, probe.directions[i]) * probe.weights[i];
    }
  });
  return flux;
}

}  // namespace

double poynting_power(const FourCurrent& src, const FarFieldProbe& probe, double h_f,
                      double dt_f, int workers) {
  const auto flux = sphere_fluxes(src, probe, h_f, dt_f, workers);
  const std::size_t ntt = probe.times.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < ntt; ++j) {
    double p = 0.0;
    for (std::size_t i = 0; i < probe.directions.size(); ++i) p += flux[i * ntt + j];
    acc += p;
  }
  return acc / static_cast<double>(ntt);
}

std::string sphere_flux_csv(const FourCurrent& src, const FarFieldProbe& probe, double h_f,
                            double dt_f, int workers) {
  const auto flux = sphere_fluxes(src, probe, h_f, dt_f, workers);
  std::ostringstream os;
  os << "node,time,flux\n";
  const std::size_t ntt = probe.times.size();
  for (std::size_t i = 0; i < probe.directions.size(); ++i)
    for (std::size_t j = 0; j < ntt; ++j)
      os << i << "," << format_double(probe.times[j]) << ","
         << format_double(flux[i * ntt + j]) << "\n";
  return os.str();
}

DipoleTrace dipole_moment_trace(const FourCurrent& src, int stride) {
  DipoleTrace out;
  for (int s = 0; s < src.nt; ++s) {
    out.times.push_back(src.t_start + s * src.dt);
    Vec3 d{};
    for (std::size_t k = 0; k < src.grid.node_count(); ++k) {
      const Vec3 p = src.grid.point(k);
      const double w = src.rho[s][k] * src.grid.quad_weight(k);
      for (int a = 0; a < src.grid.dim(); ++a) d[a] += p[a] * w;
    }
    out.dipole.push_back(d);
  }
  const double dt2 = (stride * src.dt) * (stride * src.dt);
  for (int s = stride; s + stride < src.nt; ++s) {
    out.second_diff_times.push_back(out.times[s]);
    out.second_derivative.push_back(
        (out.dipole[s + stride] - 2.0 * out.dipole[s] + out.dipole[s - stride]) / dt2);
  }
  return out;
}

MomentumSpectrum compact_packet_spectrum(const Grid& grid, double mass, double light_speed,
                                         double hbar, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw InvalidInput("compact_packet_spectrum: eps in (0,1)");
  if (grid.dim() != 3) throw InvalidInput("compact_packet_spectrum: needs a 3D grid");
  const double p_max = (1.0 - eps) * mass * light_speed;

  // Spectrum on the grid's exact periodic modes: dp = 2 pi hbar / period,
  // so the reconstructed packet is a trig polynomial of the box.
  MomentumSpectrum spec;
  spec.hbar = hbar;
  spec.support_radius = p_max;
  spec.margin = eps;
  Axis paxes[3];
  for (int a = 0; a < 3; ++a) {
    const double period = grid.extent(a);
    const double dp = 2.0 * M_PI * hbar / period;
    int half = static_cast<int>(std::ceil(1.05 * p_max / dp));
    half = std::max(half, 2);
    paxes[a] = Axis{-half * dp, half * dp, 2 * half + 1};
  }
  spec.pgrid = Grid(paxes[0], paxes[1], paxes[2]);
  spec.values.resize(spec.pgrid.node_count());
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const Vec3 p = spec.pgrid.point(k);
    const double r2 = norm_sq(p) / (p_max * p_max);
    spec.values[k] = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  }
  return spec;
}

qevolve::WaveFunction build_compact_packet(const Grid& grid, double mass,
                                           double light_speed, double hbar, double charge,
                                           double eps) {
  const double p_max = (1.0 - eps) * mass * light_speed;
  double h = grid.spacing(0);
  for (int a = 1; a < 3; ++a) h = std::max(h, grid.spacing(a));
  const double p_nyquist = M_PI * hbar / h;
  if (p_max > 0.5 * p_nyquist) {
    std::ostringstream msg;
    msg << "build_compact_packet: grid too coarse to resolve p_max; need spacing <= "
        << format_double(0.5 * M_PI * hbar / p_max) << " cm";
    throw InvalidInput(msg.str());
  }
  MomentumSpectrum spec = compact_packet_spectrum(grid, mass, light_speed, hbar, eps);
  ComplexField psi = from_momentum(spec, grid, Boundary::periodic);
  return qevolve::make_wave_function(std::move(psi), mass, charge, hbar);
}

double packet_group_speed(const Grid& grid, double mass, double light_speed, double hbar,
                          double eps) {
  MomentumSpectrum spec = compact_packet_spectrum(grid, mass, light_speed, hbar, eps);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const double a = std::norm(spec.values[k]);
    num += norm(spec.pgrid.point(k)) * a;
    den += a;
  }
  return num / den / mass;
}

FluxReport verify_theorem1(const Theorem1Params& params) {
  const PhysicalConstants& pc = params.consts;
  const double c = pc.light_speed;
  const double p_max = (1.0 - params.eps) * pc.mass * c;

  // Grid sized so the bump occupies 0.4 of the Nyquist momentum.
  const double h = 0.4 * M_PI * pc.hbar / p_max;
  const double half = 0.5 * h * (params.grid_n - 1);
  Grid grid = Grid::centered(3, half, params.grid_n);
  const double circumradius = std::sqrt(3.0) * half;

  // Time step resolving the fastest packet mode.
  const double omega_max = p_max * p_max / (2.0 * pc.mass * pc.hbar);
  const double dt = 0.1 / omega_max;
  const double window = params.steps * dt;
  const double taper = params.taper_steps * dt;

  auto packet = build_compact_packet(grid, pc.mass, c, pc.hbar, pc.charge, params.eps);
  ScalarField zero_v(grid, Boundary::periodic);
  FourCurrent packet_src =
      four_current_from_evolution(packet, zero_v, c, window, dt, taper);
  packet_src.validate();
  // Window accounting uses the radius holding all amplitudes above 5e-3
  // of the peak; the residue outside is below 4e-5 in density and stays
  // smoothly enveloped, far under the 1% power criterion.
  packet_src.compute_support_radius(5e-3);

  // Control dipole matched to the packet's internal current magnitude,
  // oscillating with a period of 24 steps.
  const double omega_c = 2.0 * M_PI / (24.0 * dt);
  double current_l1 = 0.0;
  {
    const int mid = packet_src.nt / 2;
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      double j2 = 0.0;
      for (int a = 0; a < 3; ++a) j2 += packet_src.cur[a][mid][k] * packet_src.cur[a][mid][k];
      acc += std::sqrt(j2);
    }
    current_l1 = acc * grid.cell_volume();
  }
  const double d0 = current_l1 / omega_c;
  const double sigma_b = 0.1 * c / omega_c;  // form factor e^{-(k sigma)^2} within 1%
  Grid ctrl_grid = Grid::centered(3, 6.0 * sigma_b, 24);
  FourCurrent control =
      oscillating_dipole_source(ctrl_grid, c, d0, omega_c, sigma_b, 0.0, window, dt, taper);

  const double lambda_c = 2.0 * M_PI * c / omega_c;
  const double h_f = lambda_c / 40.0;
  const double dt_f = 0.5 * dt;

  FluxReport report;
  report.larmor_expected = d0 * d0 * std::pow(omega_c, 4) / (3.0 * c * c * c);

  const double r_src = packet_src.support_radius;
  const double half_period = M_PI / omega_c;
  for (double factor : params.radius_factors) {
    const double radius = factor * circumradius;
    const double t_first = taper + (radius + r_src + h_f) / c + 2.0 * dt_f;
    const double t_last = t_first + half_period;
    const double t_limit = window - taper + (radius - r_src - h_f) / c - 2.0 * dt_f;
    if (t_last > t_limit) {
      std::ostringstream msg;
      msg << "verify_theorem1: window too short for radius " << format_double(radius)
          << "; need at least "
          << static_cast<int>(std::ceil((t_last - t_limit + window) / dt)) << " steps";
      throw DiagnosticError(msg.str());
    }
    std::vector<double> times(params.eval_times);
    for (int k = 0; k < params.eval_times; ++k)
      times[k] = t_first + k * half_period / params.eval_times;

    FarFieldProbe probe =
        FarFieldProbe::product_gauss(radius, params.n_theta, params.n_phi, times);
    probe.validate(circumradius);

    report.radii.push_back(radius);
    const bool last_radius = &factor == &params.radius_factors.back();
    double p_packet;
    if (last_radius) {
      const auto flux = sphere_fluxes(packet_src, probe, h_f, dt_f, params.workers);
      std::ostringstream csv;
      csv << "node,time,flux\n";
      const std::size_t ntt = probe.times.size();
      double acc = 0.0;
      for (std::size_t i = 0; i < probe.directions.size(); ++i)
        for (std::size_t jt = 0; jt < ntt; ++jt)
          csv << i << "," << format_double(probe.times[jt]) << ","
              << format_double(flux[i * ntt + jt]) << "\n";
      for (std::size_t jt = 0; jt < ntt; ++jt) {
        double pt = 0.0;
        for (std::size_t i = 0; i < probe.directions.size(); ++i) pt += flux[i * ntt + jt];
        acc += pt;
      }
      p_packet = acc / static_cast<double>(ntt);
      report.sphere_csv = csv.str();
    } else {
      p_packet = poynting_power(packet_src, probe, h_f, dt_f, params.workers);
    }
    report.packet_power.push_back(p_packet);
    report.control_power.push_back(
        poynting_power(control, probe, h_f, dt_f, params.workers));
    // Quadrature-noise scale of the reported packet power: shift under a
    // refined differentiation stencil.
    report.noise_floor.push_back(
        params.with_noise_floor
            ? std::abs(poynting_power(packet_src, probe, 0.5 * h_f, 0.5 * dt_f,
                                      params.workers) -
                       p_packet)
            : 0.0);
  }

  // Dipole route: strided second difference of the packet dipole moment
  // inside the flat window.
  DipoleTrace dip = dipole_moment_trace(packet_src);
  double ddot_sq = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < dip.second_diff_times.size(); ++i) {
    const double t = dip.second_diff_times[i];
    if (t < taper + 4 * dt || t > window - taper - 4 * dt) continue;
    ddot_sq += norm_sq(dip.second_derivative[i]);
    ++used;
  }
  if (used) ddot_sq /= static_cast<double>(used);
  report.dipole_route_power = (2.0 / 3.0) * ddot_sq / (c * c * c);

  // Checks.
  const std::size_t last = report.radii.size() - 1;
  report.packet_ratio = report.packet_power[last] / report.control_power[last];
  double ctrl_min = report.control_power[0], ctrl_max = report.control_power[0];
  for (double p : report.control_power) {
    ctrl_min = std::min(ctrl_min, p);
    ctrl_max = std::max(ctrl_max, p);
  }
  report.control_larmor_ok =
      std::abs(report.control_power[last] - report.larmor_expected) <
      0.05 * report.larmor_expected;
  report.control_flat_ok = ctrl_max - ctrl_min < 0.10 * ctrl_max;
  report.packet_quiet_ok = std::abs(report.packet_power[last]) <
                           0.01 * report.control_power[last];
  report.monotone_decay_ok = true;
  for (std::size_t i = 0; i + 1 < report.packet_power.size(); ++i)
    if (!(std::abs(report.packet_power[i + 1]) < std::abs(report.packet_power[i])))
      report.monotone_decay_ok = false;
  report.dipole_route_ok = report.dipole_route_power < 0.01 * report.larmor_expected;
  report.noise_limited = false;
  for (std::size_t i = 0; i < report.radii.size(); ++i)
    if (report.noise_floor[i] > 0.1 * std::abs(report.packet_power[i]))
      report.noise_limited = true;

  if (report.packet_power.size() >= 2) {
    std::vector<double> lr, lp;
    for (std::size_t i = 0; i < report.radii.size(); ++i) {
      lr.push_back(std::log(report.radii[i]));
      lp.push_back(std::log(std::max(std::abs(report.packet_power[i]), 1e-300)));
    }
    report.fit_exponent = linear_fit(lr, lp).slope;
  }

  report.pass = report.control_larmor_ok && report.control_flat_ok &&
                report.packet_quiet_ok && report.monotone_decay_ok &&
                report.dipole_route_ok;
  report.note =
      "finite-grid surrogate: smooth compact-support spectrum on a periodic box; "
      "conclusions are grid-limited trends, not the infinite-radius limit";
  return report;
}

std::string flux_report_json(const FluxReport& report) {
  nlohmann::json j;
  j["radii_cm"] = report.radii;
  j["packet_power_erg_s"] = report.packet_power;
  j["control_power_erg_s"] = report.control_power;
  j["noise_floor_erg_s"] = report.noise_floor;
  j["fit_exponent"] = report.fit_exponent;
  j["larmor_expected_erg_s"] = report.larmor_expected;
  j["dipole_route_power_erg_s"] = report.dipole_route_power;
  j["packet_to_control_ratio"] = report.packet_ratio;
  j["checks"] = {{"control_larmor_ok", report.control_larmor_ok},
                 {"control_flat_ok", report.control_flat_ok},
                 {"packet_quiet_ok", report.packet_quiet_ok},
                 {"monotone_decay_ok", report.monotone_decay_ok},
                 {"dipole_route_ok", report.dipole_route_ok},
                 {"noise_limited", report.noise_limited}};
  j["pass"] = report.pass;
  j["note"] = report.note;
  return j.dump(2);
}

}  // namespace sqmlab::nonrad
