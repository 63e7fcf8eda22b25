#pragma once

#include <numbers>
#include <optional>
#include <string>

namespace ionflux {

/// CODATA 2018 values in SI units.
struct PhysicalConstants
{
  static constexpr double planck = 6.62607015e-34;                  // J s (exact)
  static constexpr double hbar = planck / (2.0 * std::numbers::pi);  // J s
  static constexpr double k_B = 1.380649e-23;                       // J/K (exact)
  static constexpr double epsilon_0 = 8.8541878128e-12;             // F/m
  static constexpr double e_charge = 1.602176634e-19;               // C (exact)
  static constexpr double amu = 1.66053906660e-27;                  // kg
  static constexpr double electron_mass = 9.1093837015e-31;         // kg
  static constexpr double speed_of_light = 299792458.0;             // m/s (exact)
};

struct IonSpecies
{
  std::string name;
  double mass = 0.0;                  // kg
  double charge = 0.0;                // C
  double transition_frequency = 0.0;  // omega_0, rad/s
  double linewidth = 0.0;             // Gamma, rad/s
  std::optional<double> wavevector_override;  // 1/m

  /// Laser wavevector; omega_0 / c unless overridden.
  double wavevector() const;

  /// q^2 / (4 pi eps0), J m.
  double coulomb_constant() const;

  /// Throws ConfigError when any invariant is broken.
  void validate() const;

  bool operator==(const IonSpecies&) const = default;
};

/// 24Mg+ driven on 3s 2S1/2 -> 3p 2P1/2.
IonSpecies magnesium24();

/// Looks up a built-in species by name ("Mg24"); throws ConfigError otherwise.
IonSpecies species_preset(const std::string& name);

/// Natural units of a chain: mass m, time 1/omega_ref, length l.
///
/// All solvers work in these units. With them the on-site stiffness of the
/// reference trap is 1 and the Coulomb constant q^2/(4 pi eps0) is 1.
struct Units
{
  double mass = 1.0;    // kg
  double time = 1.0;    // s
  double length = 1.0;  // m

  static Units for_species(const IonSpecies& species, double omega_ref);

  double frequency() const { return 1.0 / time; }
  double energy() const { return mass * length * length / (time * time); }
  double power() const { return energy() / time; }
  double momentum() const { return mass * length / time; }
  double friction() const { return mass / time; }
  double diffusion() const { return momentum() * momentum() / time; }
  double stiffness() const { return mass / (time * time); }
  double temperature() const { return energy() / PhysicalConstants::k_B; }
};

}  // namespace ionflux
