#include "sqmlab/constants.hpp"

#include <cmath>

#include "sqmlab/errors.hpp"

namespace sqmlab {

void PhysicalConstants::validate() const {
  if (!std::isfinite(charge) || !std::isfinite(mass) || !std::isfinite(light_speed) ||
      !std::isfinite(hbar) || !std::isfinite(boltzmann))
    throw InvalidInput("PhysicalConstants: non-finite value");
  if (mass <= 0.0 || light_speed <= 0.0 || hbar <= 0.0 || boltzmann <= 0.0)
    throw InvalidInput("PhysicalConstants: mass, c, hbar, k must be positive");
}

PhysicalConstants PhysicalConstants::electron() {
  return PhysicalConstants{
      4.80320471257e-10,  // statC (1.602176634e-19 C * c/10)
      9.1093837015e-28,   // g
      2.99792458e10,      // cm/s
      1.054571817e-27,    // erg s
      1.380649e-16,       // erg/K
  };
}

PhysicalConstants PhysicalConstants::preset(const std::string& name) {
  if (name == "electron") return electron();
  throw InvalidInput("unknown constants preset: " + name);
}

std::vector<std::string> PhysicalConstants::preset_names() { return {"electron"}; }

DerivedConstants DerivedConstants::from(const PhysicalConstants& c) {
  return DerivedConstants{sqmlab::fine_structure(c), sqmlab::characteristic_time(c)};
}

double fine_structure(const PhysicalConstants& c) {
  c.validate();
  return c.charge * c.charge / (c.hbar * c.light_speed);
}

double characteristic_time(const PhysicalConstants& c) {
  c.validate();
  const double c3 = c.light_speed * c.light_speed * c.light_speed;
  return 2.0 * c.charge * c.charge / (3.0 * c.mass * c3);
}

double planck_consistency(const PhysicalConstants& c, double nu, double temperature) {
  c.validate();
  if (!std::isfinite(nu) || !std::isfinite(temperature) || nu < 0.0 || temperature < 0.0)
    throw InvalidInput("planck_consistency: nu and T must be finite and non-negative");
  const double c3 = c.light_speed * c.light_speed * c.light_speed;
  return std::sqrt((8.0 / 3.0) * c.charge * c.charge * nu * c.boltzmann * temperature / c3);
}

double electrostatic_energy_ev(double charge, double separation) {
  if (!std::isfinite(charge) || !std::isfinite(separation) || separation <= 0.0)
    throw InvalidInput("electrostatic_energy_ev: separation must be positive");
  return erg_to_ev(charge * charge / separation);
}

}  // namespace sqmlab
