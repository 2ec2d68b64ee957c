#pragma once

#include <string>
#include <vector>

namespace sqmlab {

/// 1 eV in erg.
inline constexpr double erg_per_ev = 1.602176634e-12;

inline double erg_to_ev(double erg) { return erg / erg_per_ev; }
inline double ev_to_erg(double ev) { return ev * erg_per_ev; }

/// Base constants in cgs-Gaussian units. The charge may be zero or
/// negative; everything else must be strictly positive.
struct PhysicalConstants {
  double charge;       // statC
  double mass;         // g
  double light_speed;  // cm/s
  double hbar;         // erg s
  double boltzmann;    // erg/K

  void validate() const;

  /// CODATA 2018 electron values (charge carries the electron's magnitude,
  /// positive by the convention used throughout).
  static PhysicalConstants electron();

  static PhysicalConstants preset(const std::string& name);
  static std::vector<std::string> preset_names();
};

struct DerivedConstants {
  double fine_structure;        // dimensionless, q^2/(hbar c)
  double characteristic_time;   // s, 2 q^2 / (3 m c^3)

  static DerivedConstants from(const PhysicalConstants& c);
};

/// q^2/(hbar c).
double fine_structure(const PhysicalConstants& c);

/// 2 q^2 / (3 m c^3).
double characteristic_time(const PhysicalConstants& c);

/// The hbar implied by hbar^2/2m = 2 tau nu kT with tau = 2q^2/(3 m c^3);
/// the mass cancels, leaving sqrt((8/3) q^2 nu k T / c^3).
double planck_consistency(const PhysicalConstants& c, double nu, double temperature);

/// Coulomb energy q^2/r of two like charges, returned in eV.
double electrostatic_energy_ev(double charge, double separation);

}  // namespace sqmlab
