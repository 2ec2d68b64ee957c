#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sqmlab/field.hpp"
#include "sqmlab/logse.hpp"
#include "sqmlab/rng.hpp"

namespace sqmlab::markov {

/// Diffusion process dx = b(x) dt + dW with E(dW_i dW_j) = 2 nu delta_ij dt.
/// The factor 2 in the increment variance follows the convention used
/// throughout this project; an empty drift means b = 0 identically.
struct Model {
  std::function<Vec3(const Vec3&)> drift;  // cm/s
  double nu = 0.0;                         // cm^2/s
  int dim = 1;

  bool zero_drift() const { return !drift; }
  void validate() const;
};

/// Start of a path: a fixed point unless a sampler is installed.
struct InitialState {
  Vec3 point{};
  std::function<Vec3(Rng&)> sampler;

  static InitialState at(const Vec3& p) { return InitialState{p, nullptr}; }
  static InitialState sampled(std::function<Vec3(Rng&)> s) {
    return InitialState{Vec3{}, std::move(s)};
  }
};

/// Euler-Maruyama paths, path-major storage. Path i is a pure function of
/// (base_seed, i): reruns and worker splits can never change a path.
struct Ensemble {
  int dim = 1;
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t base_seed = 0;
  std::size_t paths = 0;
  std::size_t steps = 0;  // series length is steps + 1
  bool zero_drift = false;
  std::vector<double> data;

  std::size_t series_length() const { return steps + 1; }
  Vec3 position(std::size_t path, std::size_t step) const {
    Vec3 p;
    const std::size_t base = (path * series_length() + step) * dim;
    for (int a = 0; a < dim; ++a) p[a] = data[base + a];
    return p;
  }
};

Ensemble simulate(const Model& model, const InitialState& x0, double horizon, double dt,
                  std::size_t paths, std::uint64_t seed, int workers = 1);

struct GridSolveDiagnostics {
  std::size_t substeps = 0;
  double dt_used = 0.0;
};

/// Conservative finite-volume step of dP/dt = -div(b P) + nu lap P with
/// zero-flux walls; CFL-limited sub-stepping is automatic.
ScalarField kolmogorov_forward(const Model& model, const ScalarField& p0, double t,
                               GridSolveDiagnostics* diag = nullptr);

/// du/ds = b . grad u + nu lap u evolving conditional expectations:
/// returns u(x) = E(f(x(t)) | x(0) = x).
ScalarField kolmogorov_backward(const Model& model, const ScalarField& f, double t,
                                GridSolveDiagnostics* diag = nullptr);

/// Zero-current stationary drift b = nu grad ln(rho) for a strictly
/// positive density, interpolated off the grid.
Model stationary_drift(const ScalarField& rho, double nu);

/// Grid transition kernels P_t(y, x_i) for a set of source nodes.
struct TransitionDensity {
  Grid grid;
  double elapsed = 0.0;
  std::vector<std::size_t> source_nodes;
  std::vector<ScalarField> kernels;

  void validate() const;  // P >= 0, each kernel mass 1 within 1e-6
};

TransitionDensity transition_density(const Model& model, const Grid& grid,
                                     const std::vector<std::size_t>& sources, double t);

struct ForceEstimate {
  Vec3 value;
  Vec3 std_error;
  std::size_t paths_used = 0;
  std::size_t paths_discarded = 0;
  bool discard_warning = false;  // more than 1% of paths left the grid
};

struct McForceOptions {
  double s_step = 0.02;  // dimensionless step of the e^{-s} integral
  double s_max = 30.0;
};

/// Monte Carlo pre-acceleration force -E[int_0^inf ds e^-s grad V(x(tau s))]
/// with x(0) = x. Trapezoid along each path; weights normalized so a
/// constant grad V integrates exactly to itself.
ForceEstimate force_expectation_mc(const Model& model, const ScalarField& potential,
                                   double tau, const Vec3& x, std::size_t paths,
                                   std::uint64_t seed, const McForceOptions& opts = {},
                                   int workers = 1);

struct KernelForceOptions {
  int laguerre_nodes = 24;
  double s_max = 30.0;  // e^{-30} < 1e-13; nodes beyond are dropped
};

/// Same force through the Markov transition function: forward kernels from
/// a delta at x, combined at Gauss-Laguerre nodes in s.
Vec3 force_expectation_kernel(const Model& model, const ScalarField& potential, double tau,
                              const Vec3& x, const KernelForceOptions& opts = {});

struct ClosurePoint {
  Vec3 x;
  Vec3 target;  // kT grad ln rho
  Vec3 kernel;
  Vec3 mc;
  Vec3 mc_std_error;
};

struct ClosureReport {
  double nu = 0.0;
  double tau = 0.0;
  double thermal_energy = 0.0;
  bool d_consistent = true;         // problem.d_coeff == 2 tau nu kT
  std::vector<ClosurePoint> points;
  double kernel_max_rel_dev = 0.0;  // vs the largest target magnitude
  double mc_max_sigmas = 0.0;       // worst deviation in std-error units
};

struct ClosureOptions {
  std::vector<Vec3> points;      // defaults to +-sigma/2, +-sigma on axis 0
  std::size_t mc_paths = 20000;
  std::uint64_t mc_seed = 1;
  McForceOptions mc;
  KernelForceOptions kernel;
  int workers = 1;
};

/// The module-spanning consistency loop: stationary drift from the solved
/// density, both force routes at sample points, deviations from
/// kT grad ln rho.
ClosureReport gibbs_closure(const logse::Solution& sol, const logse::Problem& problem,
                            double nu, double tau, const ClosureOptions& opts = {});

}  // namespace sqmlab::markov
