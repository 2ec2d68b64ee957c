#include "experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sqmlab/constants.hpp"
#include "sqmlab/field_io.hpp"
#include "sqmlab/logse.hpp"
#include "sqmlab/markov.hpp"
#include "sqmlab/nonrad.hpp"
#include "sqmlab/qevolve.hpp"
#include "sqmlab/radiation.hpp"
#include "sqmlab/version.hpp"
#include "sqmlab/wiener.hpp"

namespace sqmlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

void check_keys(const json& user, const json& defaults, const std::string& path) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) throw InvalidInput("unknown config key: " + here);
    const json& dv = defaults.at(key);
    if (value.is_object() != dv.is_object())
      throw InvalidInput("config key has the wrong shape: " + here);
    if (value.is_object()) {
      check_keys(value, dv, here);
    } else if (value.is_number() != dv.is_number() ||
               value.is_string() != dv.is_string() ||
               value.is_boolean() != dv.is_boolean() ||
               value.is_array() != dv.is_array()) {
      throw InvalidInput("config key has the wrong type: " + here);
    }
  }
}

json merge(const json& defaults, const json& user) {
  json out = defaults;
  if (!user.is_object()) return out;
  for (const auto& [key, value] : user.items()) {
    if (value.is_object())
      out[key] = merge(defaults.at(key), value);
    else
      out[key] = value;
  }
  return out;
}

// ---------------------------------------------------------------- output

struct Sink {
  fs::path dir;
  std::vector<std::string> written;

  explicit Sink(const std::string& out_dir) : dir(out_dir) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw InvalidInput("cannot write " + (dir / name).string());
    os << content;
    written.push_back(name);
  }
};

CheckResult make_check(const std::string& name, double value, double threshold,
                       bool pass) {
  return CheckResult{name, value, threshold, pass};
}

CheckResult below(const std::string& name, double value, double threshold) {
  return make_check(name, value, threshold, value < threshold);
}

// ------------------------------------------------------------- plumbing

ScalarField harmonic_field(const Grid& g, double mass, double omega) {
  return ScalarField::sample(
      g, [&](Vec3 p) { return 0.5 * mass * omega * omega * norm_sq(p); });
}

double density_sigma(const ScalarField& rho) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  const Grid& g = rho.grid();
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double x = g.point(k)[0];
    const double w = rho[k] * g.quad_weight(k);
    m0 += w;
    m1 += x * w;
    m2 += x * x * w;
  }
  const double mean = m1 / m0;
  return std::sqrt(m2 / m0 - mean * mean);
}

std::string ensemble_csv(const markov::Ensemble& ens) {
  std::string out = "t,path_id";
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < ens.dim; ++a) {
    out += ",";
    out += names[a];
  }
  out += "\n";
  for (std::size_t p = 0; p < ens.paths; ++p)
    for (std::size_t s = 0; s <= ens.steps; ++s) {
      out += format_double(s * ens.dt);
      out += ",";
      out += std::to_string(p);
      const Vec3 x = ens.position(p, s);
      for (int a = 0; a < ens.dim; ++a) {
        out += ",";
        out += format_double(x[a]);
      }
      out += "\n";
    }
  return out;
}

// ----------------------------------------------------------- experiments

RunResult run_constants(const json& cfg, Sink& sink) {
  RunResult res;
  const auto pc = PhysicalConstants::preset(cfg.at("preset").get<std::string>());
  const auto dc = DerivedConstants::from(pc);

  std::string csv = "name,value,unit\n";
  csv += "charge," + format_double(pc.charge) + ",statC\n";
  csv += "mass," + format_double(pc.mass) + ",g\n";
  csv += "light_speed," + format_double(pc.light_speed) + ",cm/s\n";
  csv += "hbar," + format_double(pc.hbar) + ",erg s\n";
  csv += "boltzmann," + format_double(pc.boltzmann) + ",erg/K\n";
  csv += "fine_structure," + format_double(dc.fine_structure) + ",1\n";
  csv += "characteristic_time," + format_double(dc.characteristic_time) + ",s\n";
  sink.write("constants.csv", csv);

  json j;
  j["preset"] = cfg.at("preset");
  j["available_presets"] = PhysicalConstants::preset_names();
  j["fine_structure"] = dc.fine_structure;
  j["characteristic_time_s"] = dc.characteristic_time;
  j["electrostatic_energy_435km_ev"] = electrostatic_energy_ev(pc.charge, 4.35e7);
  sink.write("constants.json", j.dump(2));

  res.checks.push_back(below("fine_structure_vs_codata_rel",
                             std::abs(dc.fine_structure - 7.2973525693e-3) / 7.2973525693e-3,
                             1e-6));
  return res;
}

RunResult run_logse_solve(const json& cfg, Sink& sink) {
  RunResult res;
  const double mass = cfg.at("potential").at("mass").get<double>();
  const double omega = cfg.at("potential").at("omega").get<double>();
  const double kT = cfg.at("thermal_energy").get<double>();
  const double D = cfg.at("d_coeff").get<double>();
  Grid g(Axis{-cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("n").get<int>()});
  logse::Problem prob{harmonic_field(g, mass, omega), D, kT};
  prob.tol = cfg.at("tol").get<double>();
  prob.damping = cfg.at("damping").get<double>();
  auto sol = logse::solve(prob);

  std::ostringstream density_csv;
  write_field_csv(density_csv, sol.density);
  sink.write("density.csv", density_csv.str());
  json j;
  j["lambda"] = sol.lambda;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["kT"] = kT;
  j["D"] = D;
  sink.write("solution.json", j.dump(2));

  // width against the scalar fixed point of the Gausson equation
  if (kT > 0.0) {
    auto width_eq = [&](double s) {
      return 0.5 * mass * omega * omega - D / (4.0 * s * s) - kT / (2.0 * s);
    };
    double lo = 1e-12, hi = 1e8;
    for (int i = 0; i < 300; ++i) {
      const double mid = 0.5 * (lo + hi);
      (width_eq(mid) > 0.0 ? hi : lo) = mid;
    }
    const double sigma_star = std::sqrt(0.5 * (lo + hi));
    const double sigma = density_sigma(sol.density);
    res.checks.push_back(below("gausson_width_rel_dev",
                               std::abs(sigma - sigma_star) / sigma_star,
                               cfg.at("width_tolerance").get<double>()));
  }
  res.checks.push_back(below("residual", sol.residual, prob.tol * 1.0000001));
  return res;
}

RunResult run_gibbs_closure(const json& cfg, Sink& sink, std::uint64_t seed, int workers) {
  RunResult res;
  const double mass = cfg.at("mass").get<double>();
  const double omega = cfg.at("omega").get<double>();
  const double sigma = cfg.at("sigma").get<double>();
  const double nu = cfg.at("nu").get<double>();
  const double tau = cfg.at("tau").get<double>();
  const double s2 = sigma * sigma;
  const double kT = mass * omega * omega * s2 / (1.0 + tau * nu / s2);
  const double D = 2.0 * tau * nu * kT;

  Grid g(Axis{-cfg.at("grid").at("half_extent_sigmas").get<double>() * sigma,
              cfg.at("grid").at("half_extent_sigmas").get<double>() * sigma,
              cfg.at("grid").at("n").get<int>()});
  logse::Problem prob{harmonic_field(g, mass, omega), D, kT};
  prob.tol = 1e-10;
  auto sol = logse::solve(prob);

  markov::ClosureOptions opts;
  opts.mc_paths = cfg.at("mc_paths").get<std::size_t>();
  opts.mc_seed = seed;
  opts.mc.s_step = cfg.at("mc_s_step").get<double>();
  opts.workers = workers;
  auto report = markov::gibbs_closure(sol, prob, nu, tau, opts);

  json j;
  j["nu"] = report.nu;
  j["tau"] = report.tau;
  j["thermal_energy"] = report.thermal_energy;
  j["kernel_max_rel_dev"] = report.kernel_max_rel_dev;
  j["mc_max_sigmas"] = report.mc_max_sigmas;
  json pts = json::array();
  for (const auto& p : report.points) {
    json e;
    e["x"] = p.x[0];
    e["target"] = p.target[0];
    e["kernel"] = p.kernel[0];
    e["mc"] = p.mc[0];
    e["mc_std_error"] = p.mc_std_error[0];
    pts.push_back(e);
  }
  j["points"] = pts;
  sink.write("closure.json", j.dump(2));

  res.checks.push_back(below("kernel_max_rel_dev", report.kernel_max_rel_dev,
                             cfg.at("kernel_tolerance").get<double>()));
  res.checks.push_back(below("mc_max_sigmas", report.mc_max_sigmas, 4.0));
  return res;
}

RunResult run_sde(const json& cfg, Sink& sink, std::uint64_t seed, int workers) {
  RunResult res;
  const std::string type = cfg.at("model").at("type").get<std::string>();
  const double gamma = cfg.at("model").at("gamma").get<double>();
  const double nu = cfg.at("nu").get<double>();
  const int dim = cfg.at("dim").get<int>();
  markov::Model model{nullptr, nu, dim};
  if (type == "ou") {
    model.drift = [gamma](const Vec3& x) { return -gamma * x; };
  } else if (type != "free") {
    throw InvalidInput("sde: model.type must be 'free' or 'ou'");
  }
  auto ens = markov::simulate(model, markov::InitialState::at(Vec3{}),
                              cfg.at("horizon").get<double>(), cfg.at("dt").get<double>(),
                              cfg.at("paths").get<std::size_t>(), seed, workers);
  sink.write("ensemble.csv", ensemble_csv(ens));

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t p = 0; p < ens.paths; ++p) {
    const double r2 = norm_sq(ens.position(p, ens.steps));
    sum += r2;
    sum_sq += r2 * r2;
  }
  const double mean = sum / ens.paths;
  const double se = std::sqrt(std::max(0.0, sum_sq / ens.paths - mean * mean) /
                              static_cast<double>(ens.paths));
  json j;
  j["mean_sq_displacement"] = mean;
  j["std_error"] = se;
  sink.write("moments.json", j.dump(2));

  if (type == "free") {
    const double expected = 2.0 * dim * nu * ens.horizon;
    res.checks.push_back(
        make_check("free_msd_sigmas", std::abs(mean - expected) / std::max(se, 1e-300),
                   4.0, std::abs(mean - expected) < 4.0 * se));
  }
  return res;
}

RunResult run_kolmogorov(const json& cfg, Sink& sink) {
  RunResult res;
  const double nu = cfg.at("nu").get<double>();
  const double t = cfg.at("time").get<double>();
  Grid g(Axis{-cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("n").get<int>()});
  ScalarField p0(g);
  p0[g.nearest_node(Vec3{})] = 1.0 / g.cell_volume();
  markov::GridSolveDiagnostics diag;
  auto p = markov::kolmogorov_forward(markov::Model{nullptr, nu, 1}, p0, t, &diag);

  std::ostringstream field_csv;
  write_field_csv(field_csv, p, t);
  sink.write("density.csv", field_csv.str());

  double l1 = 0.0;
  const double var = 2.0 * nu * t;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = g.point(k)[0];
    l1 += std::abs(p[k] - std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * M_PI * var)) *
          g.quad_weight(k);
  }
  json j;
  j["heat_kernel_l1_error"] = l1;
  j["substeps"] = diag.substeps;
  j["dt_used"] = diag.dt_used;
  sink.write("diagnostics.json", j.dump(2));
  res.checks.push_back(
      below("heat_kernel_l1_error", l1, cfg.at("l1_tolerance").get<double>()));
  return res;
}

RunResult run_force_expectation(const json& cfg, Sink& sink, std::uint64_t seed,
                                int workers) {
  RunResult res;
  const double gamma = cfg.at("gamma").get<double>();
  const double nu = cfg.at("nu").get<double>();
  const double tau = cfg.at("tau").get<double>();
  const double mass = cfg.at("mass").get<double>();
  const double omega = cfg.at("omega").get<double>();
  const double x0 = cfg.at("x").get<double>();
  Grid g(Axis{-cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("half_extent").get<double>(),
              cfg.at("grid").at("n").get<int>()});
  auto V = harmonic_field(g, mass, omega);
  markov::Model model{[gamma](const Vec3& x) { return -gamma * x; }, nu, 1};

  auto kernel = markov::force_expectation_kernel(model, V, tau, Vec3{x0});
  auto mc = markov::force_expectation_mc(model, V, tau, Vec3{x0},
                                         cfg.at("paths").get<std::size_t>(), seed, {},
                                         workers);
  const double closed_form = -mass * omega * omega * x0 / (1.0 + gamma * tau);

  json j;
  j["kernel"] = kernel[0];
  j["mc"] = mc.value[0];
  j["mc_std_error"] = mc.std_error[0];
  j["ou_closed_form"] = closed_form;
  j["paths_discarded"] = mc.paths_discarded;
  j["discard_warning"] = mc.discard_warning;
  sink.write("force.json", j.dump(2));

  res.checks.push_back(below("kernel_vs_closed_form_rel",
                             std::abs(kernel[0] - closed_form) / std::abs(closed_form),
                             0.01));
  const double gap = std::abs(mc.value[0] - kernel[0]);
  res.checks.push_back(make_check("routes_gap_sigmas", gap / std::max(mc.std_error[0], 1e-300),
                                  4.0, gap < 4.0 * mc.std_error[0] + 0.01 * std::abs(kernel[0])));
  return res;
}

RunResult run_bremsstrahlung(const json& cfg, Sink& sink) {
  RunResult res;
  const std::string preset = cfg.at("preset").get<std::string>();
  const auto pc = PhysicalConstants{
      cfg.at("constants").at("charge").get<double>(),
      cfg.at("constants").at("mass").get<double>(),
      cfg.at("constants").at("light_speed").get<double>(),
      cfg.at("constants").at("hbar").get<double>(),
      cfg.at("constants").at("boltzmann").get<double>(),
  };
  const int n = cfg.at("grid").at("n").get<int>();
  const double half = cfg.at("grid").at("half_extent").get<double>();
  Grid g(Axis{-half, half, n});
  const double horizon = cfg.at("horizon").get<double>();
  const int snapshots = cfg.at("snapshots").get<int>();

  radiation::EvolutionTrace trace;
  ScalarField V(g);
  if (preset == "harmonic-ground-state") {
    const double omega = cfg.at("omega").get<double>();
    V = harmonic_field(g, pc.mass, omega);
    const double s2 = pc.hbar / (2.0 * pc.mass * omega);
    auto rho = ScalarField::sample(
        g, [&](Vec3 p) { return std::exp(-norm_sq(p) / (2.0 * s2)); });
    const double m0 = integrate(rho);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] /= m0;
    VectorField grad_v = gradient(V);
    Vec3 a_mean{};
    double a2 = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      const double w = rho[k] * g.quad_weight(k);
      const double a = -grad_v.component(0)[k] / pc.mass;
      a_mean[0] += a * w;
      a2 += a * a * w;
    }
    for (int s = 0; s < snapshots; ++s) {
      trace.times.push_back(horizon * s / (snapshots - 1));
      trace.accel_mean.push_back(a_mean);
      trace.accel_sq_mean.push_back(a2);
      trace.density.push_back(rho);
    }
  } else if (preset == "free-packet" || preset == "coherent" || preset == "linear") {
    const double sigma0 = cfg.at("sigma0").get<double>();
    const double center = preset == "coherent" ? cfg.at("center").get<double>() : 0.0;
    auto psi = ComplexField::sample(g, [&](Vec3 p) {
      const double dx = p[0] - center;
      return std::complex<double>(std::exp(-dx * dx / (4.0 * sigma0 * sigma0)), 0.0);
    });
    auto wf = qevolve::make_wave_function(std::move(psi), pc.mass, pc.charge, pc.hbar);
    if (preset == "coherent")
      V = harmonic_field(g, pc.mass, cfg.at("omega").get<double>());
    else if (preset == "linear")
      V = ScalarField::sample(g, [&](Vec3 p) { return cfg.at("slope").get<double>() * p[0]; });
    trace = radiation::make_trace(wf, V, horizon, cfg.at("dt").get<double>(), snapshots);
  } else {
    throw InvalidInput("bremsstrahlung: unknown preset " + preset);
  }

  auto rep = radiation::report(trace, V, pc);
  sink.write("report.json", radiation::report_json(rep));
  sink.write("report.csv", radiation::report_csv(rep));

  res.checks.push_back(make_check("stochastic_divergent", 1.0, 1.0,
                                  rep.stochastic_energy.divergent));
  res.checks.push_back(make_check(
      "qed_ge_hydrodynamic", rep.qed_energy.erg - rep.hydrodynamic_energy.erg, 0.0,
      rep.qed_energy.erg >= rep.hydrodynamic_energy.erg -
                                1e-12 * std::max(1.0, std::abs(rep.qed_energy.erg))));
  if (preset == "harmonic-ground-state") {
    res.checks.push_back(below("hydrodynamic_over_qed",
                               std::abs(rep.hydrodynamic_energy.erg) /
                                   std::max(rep.qed_energy.erg, 1e-300),
                               1e-10));
    res.checks.push_back(make_check("qed_positive", rep.qed_energy.erg, 0.0,
                                    rep.qed_energy.erg > 0.0));
    res.checks.push_back(below("bohmian_over_qed",
                               std::abs(rep.bohmian_energy.erg) /
                                   std::max(rep.qed_energy.erg, 1e-300),
                               1e-8));
  }
  if (preset == "free-packet") {
    res.checks.push_back(make_check("bohmian_positive", rep.bohmian_energy.erg, 0.0,
                                    rep.bohmian_energy.erg > 0.0));
    res.checks.push_back(below("qed_abs", std::abs(rep.qed_energy.erg), 1e-20));
  }
  return res;
}

RunResult run_nonrad_verify(const json& cfg, Sink& sink, int workers) {
  RunResult res;
  nonrad::Theorem1Params params;
  params.eps = cfg.at("eps").get<double>();
  params.grid_n = cfg.at("grid_n").get<int>();
  params.steps = cfg.at("steps").get<int>();
  params.radius_factors = cfg.at("radius_factors").get<std::vector<double>>();
  params.n_theta = cfg.at("n_theta").get<int>();
  params.n_phi = cfg.at("n_phi").get<int>();
  params.eval_times = cfg.at("eval_times").get<int>();
  params.workers = workers;
  auto report = nonrad::verify_theorem1(params);
  sink.write("flux_report.json", nonrad::flux_report_json(report));
  if (!report.sphere_csv.empty()) sink.write("sphere.csv", report.sphere_csv);

  res.checks.push_back(make_check("pass", report.pass ? 1.0 : 0.0, 1.0, report.pass));
  res.checks.push_back(below("packet_to_control_ratio", report.packet_ratio, 0.01));
  return res;
}

RunResult run_wiener_props(const json& cfg, Sink& sink, std::uint64_t seed) {
  RunResult res;
  const double nu = cfg.at("nu").get<double>();
  const double horizon = cfg.at("horizon").get<double>();
  auto ens = markov::simulate(markov::Model{nullptr, nu, 1},
                              markov::InitialState::at(Vec3{}), horizon,
                              cfg.at("dt").get<double>(),
                              cfg.at("paths").get<std::size_t>(), seed);
  std::string csv = "t1,t2,estimate,stderr,n\n";
  const int nt = cfg.at("time_points").get<int>();
  bool cov_ok = true;
  double worst_sigmas = 0.0;
  for (int i = 1; i <= nt; ++i)
    for (int j = 1; j <= nt; ++j) {
      const double t1 = horizon * i / nt, t2 = horizon * j / nt;
      auto est = wiener::covariance(ens, t1, t2);
      csv += format_double(est.t1) + "," + format_double(est.t2) + "," +
             format_double(est.value) + "," + format_double(est.std_error) + "," +
             std::to_string(est.samples) + "\n";
      const double expected = 2.0 * nu * std::min(est.t1, est.t2);
      const double sigmas = std::abs(est.value - expected) / est.std_error;
      worst_sigmas = std::max(worst_sigmas, sigmas);
      if (sigmas >= 4.0) cov_ok = false;
    }
  sink.write("covariance.csv", csv);

  auto slopes = wiener::one_sided_derivative(ens, 0.6 * horizon, 0.1 * horizon);

  auto dim_ens = markov::simulate(markov::Model{nullptr, nu, 2},
                                  markov::InitialState::at(Vec3{}),
                                  cfg.at("dimension").at("horizon").get<double>(),
                                  cfg.at("dimension").at("dt").get<double>(), 1, seed + 1);
  auto dim_rep = wiener::fractal_dimension(wiener::path_points(dim_ens, 0), 2);
  json j;
  j["dimension"] = dim_rep.dimension;
  j["fit_r_squared"] = dim_rep.fit_r_squared;
  j["measured_decades"] = dim_rep.measured_decades;
  j["slope_below"] = slopes.below;
  j["slope_below_stderr"] = slopes.below_std_error;
  j["slope_above"] = slopes.above;
  j["slope_above_stderr"] = slopes.above_std_error;
  sink.write("dimension.json", j.dump(2));

  res.checks.push_back(make_check("covariance_worst_sigmas", worst_sigmas, 4.0, cov_ok));
  res.checks.push_back(make_check(
      "slope_below_sigmas", std::abs(slopes.below - 2.0 * nu) / slopes.below_std_error,
      4.0, std::abs(slopes.below - 2.0 * nu) < 4.0 * slopes.below_std_error));
  res.checks.push_back(make_check("slope_above_sigmas",
                                  std::abs(slopes.above) / slopes.above_std_error, 4.0,
                                  std::abs(slopes.above) < 4.0 * slopes.above_std_error));
  res.checks.push_back(make_check("dimension_in_band", dim_rep.dimension, 0.0,
                                  dim_rep.dimension > 1.55 && dim_rep.dimension < 2.15));
  return res;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"constants",   "logse-solve",       "gibbs-closure", "sde",
          "kolmogorov",  "force-expectation", "bremsstrahlung", "nonrad-verify",
          "wiener-props"};
}

json default_config(const std::string& experiment) {
  json j;
  if (experiment == "constants") {
    j["preset"] = "electron";
  } else if (experiment == "logse-solve") {
    j["grid"] = {{"half_extent", 1.7}, {"n", 1024}};
    j["potential"] = {{"mass", 1.0}, {"omega", 3.0}};
    j["thermal_energy"] = 0.4;
    j["d_coeff"] = 0.05;
    j["tol"] = 1e-10;
    j["damping"] = 0.5;
    j["width_tolerance"] = 1e-4;
  } else if (experiment == "gibbs-closure") {
    j["mass"] = 1.0;
    j["omega"] = 2.0;
    j["sigma"] = 0.5;
    j["nu"] = 0.3;
    j["tau"] = 0.25;
    j["grid"] = {{"half_extent_sigmas", 7.0}, {"n", 401}};
    j["mc_paths"] = 20000;
    j["mc_s_step"] = 0.02;
    j["kernel_tolerance"] = 0.02;
  } else if (experiment == "sde") {
    j["model"] = {{"type", "free"}, {"gamma", 1.0}};
    j["nu"] = 0.35;
    j["dim"] = 3;
    j["horizon"] = 2.0;
    j["dt"] = 0.25;
    j["paths"] = std::size_t{512};
  } else if (experiment == "kolmogorov") {
    j["nu"] = 0.5;
    j["time"] = 0.5;
    j["grid"] = {{"half_extent", 6.0}, {"n", 321}};
    j["l1_tolerance"] = 1e-3;
  } else if (experiment == "force-expectation") {
    j["gamma"] = 1.2;
    j["nu"] = 0.3;
    j["tau"] = 0.5;
    j["mass"] = 1.0;
    j["omega"] = 2.0;
    j["x"] = 0.6;
    j["grid"] = {{"half_extent", 8.0}, {"n", 321}};
    j["paths"] = std::size_t{20000};
  } else if (experiment == "bremsstrahlung") {
    j["preset"] = "harmonic-ground-state";
    j["constants"] = {{"charge", 1.0},
                      {"mass", 1.0},
                      {"light_speed", 7.0},
                      {"hbar", 1.0},
                      {"boltzmann", 1.0}};
    j["grid"] = {{"half_extent", 4.0}, {"n", 1025}};
    j["omega"] = 2.0;
    j["sigma0"] = 1.0;
    j["center"] = 1.0;
    j["slope"] = 0.5;
    j["horizon"] = 2.0;
    j["dt"] = 0.005;
    j["snapshots"] = 9;
  } else if (experiment == "nonrad-verify") {
    j["eps"] = 0.5;
    j["grid_n"] = 32;
    j["steps"] = 128;
    j["radius_factors"] = std::vector<double>{4.0, 6.0, 8.0};
    j["n_theta"] = 8;
    j["n_phi"] = 16;
    j["eval_times"] = 8;
  } else if (experiment == "wiener-props") {
    j["nu"] = 0.5;
    j["horizon"] = 2.0;
    j["dt"] = 0.1;
    j["paths"] = std::size_t{100000};
    j["time_points"] = 5;
    j["dimension"] = {{"horizon", 2.0}, {"dt", 1e-5}};
  } else {
    throw InvalidInput("unknown experiment: " + experiment);
  }
  return j;
}

RunResult run_experiment(const std::string& experiment, const json& user_config,
                         const std::string& out_dir,
                         std::optional<std::uint64_t> seed_override, int workers,
                         int verbosity) {
  RunResult res;
  try {
    json defaults = default_config(experiment);
    defaults["seed"] = std::uint64_t{1};
    check_keys(user_config, defaults, "");
    json cfg = merge(defaults, user_config);
    if (seed_override) cfg["seed"] = *seed_override;
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

    Sink sink(out_dir);
    if (verbosity > 0)
      std::cerr << "[sqmlab] running " << experiment << " into " << out_dir << "\n";

    if (experiment == "constants")
      res = run_constants(cfg, sink);
    else if (experiment == "logse-solve")
      res = run_logse_solve(cfg, sink);
    else if (experiment == "gibbs-closure")
      res = run_gibbs_closure(cfg, sink, seed, workers);
    else if (experiment == "sde")
      res = run_sde(cfg, sink, seed, workers);
    else if (experiment == "kolmogorov")
      res = run_kolmogorov(cfg, sink);
    else if (experiment == "force-expectation")
      res = run_force_expectation(cfg, sink, seed, workers);
    else if (experiment == "bremsstrahlung")
      res = run_bremsstrahlung(cfg, sink);
    else if (experiment == "nonrad-verify")
      res = run_nonrad_verify(cfg, sink, workers);
    else if (experiment == "wiener-props")
      res = run_wiener_props(cfg, sink, seed);
    else
      throw InvalidInput("unknown experiment: " + experiment);

    res.pass = true;
    for (const auto& c : res.checks) res.pass = res.pass && c.pass;
    res.exit_code = res.pass ? exit_pass : exit_check_failed;

    json manifest;
    manifest["experiment"] = experiment;
    manifest["version"] = version_string;
    manifest["seed"] = seed;
    manifest["config"] = cfg;
    manifest["pass"] = res.pass;
    json checks = json::array();
    for (const auto& c : res.checks) {
      json e;
      e["name"] = c.name;
      e["value"] = c.value;
      e["threshold"] = c.threshold;
      e["pass"] = c.pass;
      checks.push_back(e);
    }
    manifest["checks"] = checks;
    manifest["outputs"] = sink.written;
    sink.write("manifest.json", manifest.dump(2));
    res.outputs = sink.written;
    res.message = res.pass ? "pass" : "quantitative check failed";
  } catch (const std::exception& e) {
    res.exit_code = exit_error;
    res.pass = false;
    res.message = e.what();
  }
  return res;
}

}  // namespace sqmlab::cli
