#include "ionflux/constants.hpp"

#include <cmath>

#include "ionflux/errors.hpp"

namespace ionflux {

double IonSpecies::wavevector() const
{
  if (wavevector_override) {
    return *wavevector_override;
  }
  return transition_frequency / PhysicalConstants::speed_of_light;
}

double IonSpecies::coulomb_constant() const
{
  return charge * charge / (4.0 * std::numbers::pi * PhysicalConstants::epsilon_0);
}

void IonSpecies::validate() const
{
  if (!(mass > 0.0)) {
    throw ConfigError("species '" + name + "': mass must be positive");
  }
  if (charge == 0.0 || !std::isfinite(charge)) {
    throw ConfigError("species '" + name + "': charge must be nonzero");
  }
  if (!(linewidth > 0.0)) {
    throw ConfigError("species '" + name + "': linewidth must be positive");
  }
  if (!(transition_frequency > 0.0)) {
    throw ConfigError("species '" + name + "': transition frequency must be positive");
  }
  if (wavevector_override && !(*wavevector_override > 0.0)) {
    throw ConfigError("species '" + name + "': wavevector must be positive");
  }
}

IonSpecies magnesium24()
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  IonSpecies mg;
  mg.name = "Mg24";
  // Atomic mass of 24Mg minus one electron.
  mg.mass = 23.985041697 * PhysicalConstants::amu - PhysicalConstants::electron_mass;
  mg.charge = PhysicalConstants::e_charge;
  mg.transition_frequency = two_pi * 1069e12;
  mg.linewidth = two_pi * 41.3e6;
  return mg;
}

IonSpecies species_preset(const std::string& name)
{
  if (name == "Mg24" || name == "24Mg+" || name == "Mg24+") {
    return magnesium24();
  }
  throw ConfigError("unknown species preset '" + name + "' (available: Mg24)");
}

Units Units::for_species(const IonSpecies& species, double omega_ref)
{
  Units u;
  u.mass = species.mass;
  u.time = 1.0 / omega_ref;
  u.length = std::cbrt(species.coulomb_constant() / (species.mass * omega_ref * omega_ref));
  return u;
}

}  // namespace ionflux
