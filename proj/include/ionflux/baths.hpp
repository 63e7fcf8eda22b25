#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionflux/chain.hpp"
#include "ionflux/constants.hpp"

namespace ionflux {

/// Intensities above this ratio are outside the low-saturation regime.
inline constexpr double kIntensityWarningRatio = 0.2;

/// One Doppler-cooling molasses beam pair acting on an end of the chain.
struct LaserBeam
{
  IonSpecies species;
  double intensity_ratio = 0.0;  // I / I_0
  double detuning = 0.0;         // delta, rad/s (negative for cooling)

  /// Throws ConfigError for non-negative detuning or negative intensity.
  void validate() const;
  std::vector<std::string> warnings() const;
};

/// Beam whose detuning is given in units of the linewidth.
LaserBeam beam_from_ratio(const IonSpecies& species, double intensity_ratio,
                          double detuning_over_linewidth);

/// Molasses friction gamma (kg/s); the drag force is -(gamma/m) p.
double friction_coefficient(const LaserBeam& beam);

/// Momentum diffusion D (kg^2 m^2 / s^3); <xi(t) xi(t')> = 2 D delta(t - t').
double diffusion_coefficient(const LaserBeam& beam);

/// Molasses temperature in kelvin for a red detuning.
double bath_temperature(double detuning, const IonSpecies& species);

/// hbar Gamma / (2 k_B), the minimum of bath_temperature.
double doppler_limit(const IonSpecies& species);

enum class DetuningBranch
{
  low,   // |2 delta / Gamma| <= 1
  high,  // |2 delta / Gamma| >= 1
};

/// Inverse of bath_temperature on the chosen branch.
double detuning_for_temperature(double temperature, const IonSpecies& species,
                                DetuningBranch branch = DetuningBranch::low);

/// Friction and diffusion per site plus the two bath temperatures.
struct BathAssignment
{
  std::vector<int> left_sites;   // zero-based
  std::vector<int> right_sites;  // zero-based
  Eigen::VectorXd gamma;         // kg/s
  Eigen::VectorXd diffusion;     // kg^2 m^2 / s^3
  double left_temperature = 0.0;   // K
  double right_temperature = 0.0;  // K
  std::vector<std::string> warnings;
};

/// Illuminates the first n_left sites with `left` and the last n_right with `right`.
BathAssignment assemble_bath(const ChainConfig& config, const LaserBeam& left,
                             const LaserBeam& right, int n_left, int n_right);

}  // namespace ionflux
