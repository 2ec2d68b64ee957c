#pragma once

#include "sqmlab/field.hpp"
#include "sqmlab/field_ops.hpp"

namespace sqmlab::logse {

/// Ground-state eigenproblem [-D lap + V + kT ln(rho)] sqrt(rho) =
/// lambda sqrt(rho) with D = 2 tau nu kT playing the hbar^2/2m role.
struct Problem {
  ScalarField potential;      // erg
  double d_coeff = 1.0;       // erg cm^2, coefficient of -laplacian
  double thermal_energy = 0;  // kT, erg
  double tol = 1e-10;         // eigen-residual target
  int max_iter = 20000;
  double damping = 0.5;       // density mixing factor per sweep
  double pseudo_step = 0.0;   // backward-Euler step (1/erg); 0 = auto

  void validate() const;
};

struct Solution {
  ScalarField log_half_density;  // R = ln(rho)/2
  ScalarField density;           // rho = e^{2R}, integral 1
  double lambda = 0.0;           // erg, for the rho-integral-1 normalization
  int iterations = 0;
  double residual = 0.0;
};

/// Damped self-consistent backward-Euler imaginary-time iteration on the
/// density-dependent operator, renormalizing every sweep; lambda is the
/// Rayleigh quotient of the final iterate. The ground state is kept real
/// and positive. Throws ConvergenceError when max_iter is exhausted and
/// DiagnosticError when the residual oscillates (log term swamping V).
Solution solve(const Problem& problem);

/// Max-norm of rho - exp[-(V - D (lap sqrt(rho))/sqrt(rho) - c0)/kT] with
/// c0 the normalization constant; small for a converged solution.
double fixed_point_residual(const Solution& sol, const Problem& problem);

/// -grad[V - D (lap sqrt(rho))/sqrt(rho)].
VectorField effective_force(const Solution& sol, const Problem& problem);

/// Normalized exp(-V/kT), max-shifted before exponentiation.
ScalarField gibbs_limit(const ScalarField& potential, double thermal_energy);

/// Density floor applied before logarithms (Dirichlet edges are exact
/// zeros).
inline constexpr double density_floor = 1e-300;

}  // namespace sqmlab::logse
