#include "sqmlab/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "sqmlab/errors.hpp"
#include "sqmlab/field_io.hpp"
#include "sqmlab/field_ops.hpp"
#include "sqmlab/logse.hpp"

namespace sqmlab::radiation {

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    acc += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
  return acc;
}

double larmor_prefactor(double q, double c) { return (2.0 / 3.0) * q * q / (c * c * c); }

}  // namespace

void EvolutionTrace::validate() const {
  if (times.size() < 2) throw InvalidInput("EvolutionTrace: need at least two times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] > times[i]))
      throw InvalidInput("EvolutionTrace: times must be strictly increasing");
  if (accel_mean.size() != times.size() || accel_sq_mean.size() != times.size())
    throw InvalidInput("EvolutionTrace: series lengths disagree");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double floor = 1e-14 * std::max(1.0, accel_sq_mean[i]);
    if (accel_sq_mean[i] + floor < norm_sq(accel_mean[i]))
      throw InvalidInput("EvolutionTrace: <a^2> < |<a>|^2 (variance negativity)");
  }
}

EvolutionTrace make_trace(const qevolve::WaveFunction& wf, const ScalarField& potential,
                          double horizon, double dt, int snapshots) {
  if (snapshots < 2) throw InvalidInput("make_trace: need at least two snapshots");
  EvolutionTrace trace;
  const double interval = horizon / (snapshots - 1);
  qevolve::WaveFunction state = wf;
  for (int s = 0; s < snapshots; ++s) {
    if (s > 0) state = qevolve::evolve(state, potential, interval, dt);
    trace.times.push_back(state.time);
    trace.accel_mean.push_back(qevolve::expect_acceleration(state, potential));
    trace.accel_sq_mean.push_back(qevolve::expect_acceleration_sq(state, potential));
    ScalarField rho(state.psi.grid(), state.psi.boundary());
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = std::norm(state.psi[k]);
    const double mass = integrate(rho);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] /= mass;
    trace.density.push_back(std::move(rho));
  }
  return trace;
}

bool energy_less(const RadiatedEnergy& a, const RadiatedEnergy& b) {
  if (a.divergent) return false;       // nothing exceeds Divergent
  if (b.divergent) return true;        // finite < Divergent
  return a.erg < b.erg;
}

std::string to_string(const RadiatedEnergy& e) {
  if (e.divergent) return e.note.empty() ? "infinite" : "infinite (" + e.note + ")";
  return format_double(e.erg) + " erg";
}

double classical(const std::vector<double>& times, const std::vector<Vec3>& accel, double q,
                 double c) {
  if (times.size() != accel.size() || times.size() < 2)
    throw InvalidInput("classical: need matching time and acceleration series");
  std::vector<double> a2(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) a2[i] = norm_sq(accel[i]);
  return larmor_prefactor(q, c) * trapezoid(times, a2);
}

double hydrodynamic(const EvolutionTrace& trace, double q, double c) {
  trace.validate();
  std::vector<double> a2(trace.times.size());
  for (std::size_t i = 0; i < a2.size(); ++i) a2[i] = norm_sq(trace.accel_mean[i]);
  return larmor_prefactor(q, c) * trapezoid(trace.times, a2);
}

double qed(const EvolutionTrace& trace, double q, double c) {
  trace.validate();
  return larmor_prefactor(q, c) * trapezoid(trace.times, trace.accel_sq_mean);
}

VectorField quantum_force(const ScalarField& rho, double hbar, double mass) {
  rho.require_finite("quantum_force");
  const Grid& g = rho.grid();
  ScalarField sqrt_rho(g, rho.boundary());
  for (std::size_t k = 0; k < rho.size(); ++k)
    sqrt_rho[k] = std::sqrt(std::max(rho[k], logse::density_floor));
  ScalarField lap = laplacian(sqrt_rho);
  ScalarField q_pot(g, rho.boundary());
  const double kin = hbar * hbar / (2.0 * mass);
  for (std::size_t k = 0; k < rho.size(); ++k) q_pot[k] = -kin * lap[k] / sqrt_rho[k];
  VectorField force = gradient(q_pot);
  for (int a = 0; a < g.dim(); ++a)
    for (double& v : force.component(a)) v = -v;
  return force;
}

double bohmian(const EvolutionTrace& trace, const ScalarField& potential, double q, double c,
               double hbar, double mass) {
  trace.validate();
  if (trace.density.size() != trace.times.size())
    throw InvalidInput("bohmian: trace carries no density snapshots");
  VectorField grad_v = gradient(potential);
  std::vector<double> integrand(trace.times.size());
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const ScalarField& rho = trace.density[i];
    if (rho.grid() != potential.grid()) throw InvalidInput("bohmian: grid mismatch");
    VectorField fq = quantum_force(rho, hbar, mass);
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      double sq = 0.0;
      for (int a = 0; a < rho.grid().dim(); ++a) {
        const double term = -grad_v.component(a)[k] / mass + fq.component(a)[k] / mass;
        sq += term * term;
      }
      acc += sq * rho[k] * rho.grid().quad_weight(k);
    }
    integrand[i] = acc;
  }
  return larmor_prefactor(q, c) * trapezoid(trace.times, integrand);
}

std::vector<std::vector<PhaseSample>> propagate_classical(
    const std::vector<PhaseSample>& initial, const ScalarField& potential, double mass,
    const std::vector<double>& times, int substeps_per_interval) {
  if (initial.empty()) throw InvalidInput("propagate_classical: empty sample set");
  const Grid& g = potential.grid();
  VectorField grad_v = gradient(potential);
  auto accel = [&](const Vec3& x) { return -1.0 / mass * interpolate(grad_v, x); };

  std::vector<std::vector<PhaseSample>> out;
  out.reserve(times.size());
  std::vector<PhaseSample> cloud = initial;
  out.push_back(cloud);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = (times[i + 1] - times[i]) / substeps_per_interval;
    for (PhaseSample& s : cloud) {
      Vec3 a = accel(s.x);
      for (int step = 0; step < substeps_per_interval; ++step) {
        // velocity Verlet
        const Vec3 v_half = s.p / mass + 0.5 * dt * a;
        s.x += dt * v_half;
        if (!g.contains(s.x))
          throw InvalidInput("propagate_classical: sample left the grid");
        a = accel(s.x);
        s.p = mass * (v_half + 0.5 * dt * a);
      }
    }
    out.push_back(cloud);
  }
  return out;
}

double newtonian_ensemble(const std::vector<std::vector<PhaseSample>>& samples,
                          const ScalarField& potential, double mass,
                          const std::vector<double>& times, double q, double c) {
  if (samples.size() != times.size() || times.size() < 2)
    throw InvalidInput("newtonian_ensemble: need samples at every trace time");
  for (const auto& cloud : samples)
    if (cloud.empty()) throw InvalidInput("newtonian_ensemble: empty sample set");
  VectorField grad_v = gradient(potential);
  std::vector<double> integrand(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    double acc = 0.0;
    for (const PhaseSample& s : samples[i])
      acc += norm_sq(interpolate(grad_v, s.x)) / (mass * mass);
    integrand[i] = acc / static_cast<double>(samples[i].size());
  }
  return larmor_prefactor(q, c) * trapezoid(times, integrand);
}

RadiatedEnergy stochastic_mechanics() {
  return RadiatedEnergy::infinite(
      "sample paths are non-differentiable, so the mean-square acceleration is unbounded");
}

void BremsstrahlungReport::validate() const {
  if (!stochastic_energy.divergent)
    throw InvalidInput("BremsstrahlungReport: stochastic entry must be Divergent");
  if (qed_energy.divergent || hydrodynamic_energy.divergent)
    throw InvalidInput("BremsstrahlungReport: qed/hydrodynamic must be finite");
  const double slack = 1e-12 * std::max(1.0, std::abs(qed_energy.erg));
  if (qed_energy.erg + slack < hydrodynamic_energy.erg)
    throw InvalidInput("BremsstrahlungReport: qed < hydrodynamic");
}

namespace {

// Stratified inverse-CDF positions from the first density snapshot with
// the packet's initial mean velocity: the canonical cold classical cloud
// for report() when the caller supplied no samples.
std::vector<PhaseSample> synthesize_cloud(const EvolutionTrace& trace, double mass,
                                          std::size_t count) {
  const ScalarField& rho = trace.density.front();
  const Grid& g = rho.grid();
  if (g.dim() != 1)
    throw InvalidInput("report: supply phase-space samples for multi-d traces");
  std::vector<double> cdf(rho.size() + 1, 0.0);
  for (std::size_t k = 0; k < rho.size(); ++k)
    cdf[k + 1] = cdf[k] + rho[k] * g.quad_weight(k);
  const double total = cdf.back();

  Vec3 v0{};
  {
    // mean velocity from the first two density centroids
    auto centroid = [&](const ScalarField& r) {
      double m0 = 0.0, m1 = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        m0 += r[k] * g.quad_weight(k);
        m1 += g.point(k)[0] * r[k] * g.quad_weight(k);
      }
      return m1 / m0;
    };
    v0[0] = (centroid(trace.density[1]) - centroid(trace.density[0])) /
            (trace.times[1] - trace.times[0]);
  }

  std::vector<PhaseSample> cloud(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = (i + 0.5) / static_cast<double>(count) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    k = std::min(std::max<std::size_t>(k, 1), rho.size()) - 1;
    const double frac = (u - cdf[k]) / std::max(cdf[k + 1] - cdf[k], 1e-300);
    cloud[i].x = Vec3{g.point(k)[0] + frac * g.spacing(0)};
    cloud[i].p = mass * v0;
  }
  return cloud;
}

}  // namespace

BremsstrahlungReport report(const EvolutionTrace& trace, const ScalarField& potential,
                            const PhysicalConstants& consts) {
  trace.validate();
  const double q = consts.charge, c = consts.light_speed;
  BremsstrahlungReport rep;
  rep.times = trace.times;

  rep.hydrodynamic_energy = RadiatedEnergy::finite(hydrodynamic(trace, q, c));
  rep.qed_energy = RadiatedEnergy::finite(qed(trace, q, c));
  rep.classical_energy =
      RadiatedEnergy::finite(classical(trace.times, trace.accel_mean, q, c));
  rep.bohmian_energy =
      RadiatedEnergy::finite(bohmian(trace, potential, q, c, consts.hbar, consts.mass));

  auto samples = trace.samples;
  if (samples.empty()) {
    auto cloud = synthesize_cloud(trace, consts.mass, 4096);
    samples = propagate_classical(cloud, potential, consts.mass, trace.times);
  }
  rep.newtonian_energy = RadiatedEnergy::finite(
      newtonian_ensemble(samples, potential, consts.mass, trace.times, q, c));
  rep.stochastic_energy = stochastic_mechanics();

  // integrand series for the CSV view
  VectorField grad_v = gradient(potential);
  const std::size_t nt = trace.times.size();
  rep.classical_integrand.resize(nt);
  rep.hydrodynamic_integrand.resize(nt);
  rep.qed_integrand.resize(nt);
  rep.bohmian_integrand.resize(nt);
  rep.newtonian_integrand.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    rep.classical_integrand[i] = norm_sq(trace.accel_mean[i]);
    rep.hydrodynamic_integrand[i] = norm_sq(trace.accel_mean[i]);
    rep.qed_integrand[i] = trace.accel_sq_mean[i];
    const ScalarField& rho = trace.density[i];
    VectorField fq = quantum_force(rho, consts.hbar, consts.mass);
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      double sq = 0.0;
      for (int a = 0; a < rho.grid().dim(); ++a) {
        const double term =
            (-grad_v.component(a)[k] + fq.component(a)[k]) / consts.mass;
        sq += term * term;
      }
      acc += sq * rho[k] * rho.grid().quad_weight(k);
    }
    rep.bohmian_integrand[i] = acc;
    double mc = 0.0;
    for (const PhaseSample& s : samples[i])
      mc += norm_sq(interpolate(grad_v, s.x)) / (consts.mass * consts.mass);
    rep.newtonian_integrand[i] = mc / static_cast<double>(samples[i].size());
  }
  rep.validate();
  return rep;
}

namespace {

nlohmann::json energy_json(const RadiatedEnergy& e) {
  if (e.divergent) return "divergent";
  return e.erg;
}

}  // namespace

std::string report_json(const BremsstrahlungReport& rep) {
  nlohmann::json j;
  j["classical"] = energy_json(rep.classical_energy);
  j["hydrodynamic"] = energy_json(rep.hydrodynamic_energy);
  j["qed"] = energy_json(rep.qed_energy);
  j["bohmian"] = energy_json(rep.bohmian_energy);
  j["newtonian"] = energy_json(rep.newtonian_energy);
  j["stochastic"] = energy_json(rep.stochastic_energy);
  if (rep.stochastic_energy.divergent && !rep.stochastic_energy.note.empty())
    j["stochastic_note"] = rep.stochastic_energy.note;
  return j.dump(2);
}

std::string report_csv(const BremsstrahlungReport& rep) {
  std::ostringstream os;
  os << "time,model,integrand\n";
  const struct {
    const char* name;
    const std::vector<double>& series;
  } rows[] = {
      {"classical", rep.classical_integrand},
      {"hydrodynamic", rep.hydrodynamic_integrand},
      {"qed", rep.qed_integrand},
      {"bohmian", rep.bohmian_integrand},
      {"newtonian", rep.newtonian_integrand},
  };
  for (const auto& row : rows)
    for (std::size_t i = 0; i < rep.times.size(); ++i)
      os << format_double(rep.times[i]) << "," << row.name << ","
         << format_double(row.series[i]) << "\n";
  return os.str();
}

}  // namespace sqmlab::radiation
