#pragma once

#include <string>
#include <vector>

#include "sqmlab/constants.hpp"
#include "sqmlab/field.hpp"
#include "sqmlab/qevolve.hpp"

namespace sqmlab::radiation {

struct PhaseSample {
  Vec3 x;  // cm
  Vec3 p;  // g cm/s
};

/// Shared dynamics record that all bremsstrahlung functionals consume, so
/// cross-model comparisons see identical evolution data.
struct EvolutionTrace {
  std::vector<double> times;                      // s, strictly increasing
  std::vector<Vec3> accel_mean;                   // <a>(t), cm/s^2
  std::vector<double> accel_sq_mean;              // <a^2>(t), cm^2/s^4
  std::vector<ScalarField> density;               // normalized probability density
  std::vector<std::vector<PhaseSample>> samples;  // optional phase-space clouds

  void validate() const;
};

/// Runs the wave function forward and records `snapshots` equally spaced
/// trace entries (the initial state included).
EvolutionTrace make_trace(const qevolve::WaveFunction& wf, const ScalarField& potential,
                          double horizon, double dt, int snapshots);

/// Radiated energy that may be the Divergent sentinel; never a floating
/// infinity so serialized reports stay lossless.
struct RadiatedEnergy {
  bool divergent = false;
  double erg = 0.0;
  std::string note;

  static RadiatedEnergy finite(double e) { return {false, e, {}}; }
  static RadiatedEnergy infinite(std::string why) { return {true, 0.0, std::move(why)}; }
};

/// Ordering with Divergent above every finite energy.
bool energy_less(const RadiatedEnergy& a, const RadiatedEnergy& b);
std::string to_string(const RadiatedEnergy& e);  // "infinite" when divergent

/// (2/3)(q^2/c^3) integral |a(t)|^2 dt by trapezoid.
double classical(const std::vector<double>& times, const std::vector<Vec3>& accel, double q,
                 double c);

/// Same integral with |<a>(t)|^2.
double hydrodynamic(const EvolutionTrace& trace, double q, double c);

/// Same integral with <a^2>(t).
double qed(const EvolutionTrace& trace, double q, double c);

/// F_QM = -grad[-(hbar^2/2m) lap(sqrt rho)/sqrt rho].
VectorField quantum_force(const ScalarField& rho, double hbar, double mass);

/// Spatial quadrature of (a(x) + F_QM/m)^2 rho per time, then the time
/// integral; a(x) is the local classical field -grad V / m.
double bohmian(const EvolutionTrace& trace, const ScalarField& potential, double q, double c,
               double hbar, double mass);

/// Leapfrog propagation of a phase-space cloud through the trace times.
std::vector<std::vector<PhaseSample>> propagate_classical(
    const std::vector<PhaseSample>& initial, const ScalarField& potential, double mass,
    const std::vector<double>& times, int substeps_per_interval = 16);

/// Monte Carlo <a^2> over evolving classical samples, time-integrated.
double newtonian_ensemble(const std::vector<std::vector<PhaseSample>>& samples,
                          const ScalarField& potential, double mass,
                          const std::vector<double>& times, double q, double c);

/// Always the Divergent sentinel (non-differentiable paths give unbounded
/// mean-square acceleration).
RadiatedEnergy stochastic_mechanics();

struct BremsstrahlungReport {
  RadiatedEnergy classical_energy;
  RadiatedEnergy hydrodynamic_energy;
  RadiatedEnergy qed_energy;
  RadiatedEnergy bohmian_energy;
  RadiatedEnergy newtonian_energy;
  RadiatedEnergy stochastic_energy;

  // per-time integrands of the five finite rows, for the long-format CSV
  std::vector<double> times;
  std::vector<double> classical_integrand;
  std::vector<double> hydrodynamic_integrand;
  std::vector<double> qed_integrand;
  std::vector<double> bohmian_integrand;
  std::vector<double> newtonian_integrand;

  void validate() const;  // qed >= hydrodynamic, stochastic divergent
};

/// Runs all six functionals on one shared trace. When the trace carries no
/// phase-space samples, the Newtonian cloud is synthesized from the first
/// density snapshot (stratified sampling) with the packet's mean velocity.
BremsstrahlungReport report(const EvolutionTrace& trace, const ScalarField& potential,
                            const PhysicalConstants& consts);

/// {model: energy_erg | "divergent"} document.
std::string report_json(const BremsstrahlungReport& rep);

/// Long format: time,model,integrand rows for the five finite models.
std::string report_csv(const BremsstrahlungReport& rep);

}  // namespace sqmlab::radiation
