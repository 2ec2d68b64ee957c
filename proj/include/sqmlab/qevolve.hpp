#pragma once

#include "sqmlab/field.hpp"
#include "sqmlab/field_ops.hpp"

namespace sqmlab::qevolve {

struct WaveFunction {
  ComplexField psi;
  double mass = 1.0;    // g
  double charge = 0.0;  // statC
  double hbar = 1.0;    // erg s
  double time = 0.0;    // s

  /// Trapezoid norm integral of |psi|^2.
  double norm_sq() const;
  /// Checks unit norm (1e-8) and boundary decay (1e-8 of the peak).
  void validate() const;
};

/// Normalizes a sampled field into a wave function.
WaveFunction make_wave_function(ComplexField psi, double mass, double charge, double hbar,
                                double time = 0.0);

/// Crank-Nicolson (implicit midpoint) step of i hbar dpsi/dt =
/// [-(hbar^2/2m) lap + V] psi; unitary in the discrete l2 norm. Advances
/// by `t` in steps of `dt` (final step shortened to land exactly on t).
WaveFunction evolve(const WaveFunction& wf, const ScalarField& potential, double t,
                    double dt);

/// Same stepping with the extra logarithmic potential kT ln|psi|^2,
/// applied at half-step values (predictor-corrector) to keep second
/// order; kT = 0 takes exactly the linear path.
WaveFunction evolve_log(const WaveFunction& wf, const ScalarField& potential,
                        double thermal_energy, double t, double dt);

struct CurrentDensity {
  ScalarField charge_density;  // statC/cm^3
  VectorField current;         // statC/(cm^2 s)
  double time = 0.0;
};

/// rho_q = q |psi|^2 and J = (q hbar / m) Im(psi* grad psi).
CurrentDensity current(const WaveFunction& wf);

Vec3 expect_position(const WaveFunction& wf);

/// <a> with a = -grad V / m as a multiplicative observable.
Vec3 expect_acceleration(const WaveFunction& wf, const ScalarField& potential);

/// <a^2> = integral |grad V / m|^2 |psi|^2.
double expect_acceleration_sq(const WaveFunction& wf, const ScalarField& potential);

/// <psi| -(hbar^2/2m) lap + V |psi> with the solver's discrete laplacian.
double energy(const WaveFunction& wf, const ScalarField& potential);

}  // namespace sqmlab::qevolve
