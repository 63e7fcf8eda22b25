#include "ionflux/baths.hpp"

#include <cmath>
#include <sstream>

#include "ionflux/errors.hpp"

namespace ionflux {

namespace {

using PC = PhysicalConstants;

// s = 2 delta / Gamma
double reduced_detuning(double detuning, const IonSpecies& species)
{
  return 2.0 * detuning / species.linewidth;
}

}  // namespace

void LaserBeam::validate() const
{
  species.validate();
  if (!(intensity_ratio >= 0.0) || !std::isfinite(intensity_ratio)) {
    throw ConfigError("laser intensity ratio must be non-negative");
  }
  if (!(detuning < 0.0)) {
    throw ConfigError("positive detuning: bath model requires cooling (detuning must be below zero)");
  }
}

std::vector<std::string> LaserBeam::warnings() const
{
  std::vector<std::string> out;
  if (intensity_ratio > kIntensityWarningRatio) {
    std::ostringstream msg;
    msg << "intensity ratio " << intensity_ratio
        << " exceeds the low-saturation regime (I/I0 > " << kIntensityWarningRatio << ")";
    out.push_back(msg.str());
  }
  return out;
}

LaserBeam beam_from_ratio(const IonSpecies& species, double intensity_ratio,
                          double detuning_over_linewidth)
{
  return LaserBeam{species, intensity_ratio, detuning_over_linewidth * species.linewidth};
}

double friction_coefficient(const LaserBeam& beam)
{
  beam.validate();
  const double k = beam.species.wavevector();
  const double s = reduced_detuning(beam.detuning, beam.species);
  const double lorentz = 1.0 + s * s;
  return -4.0 * PC::hbar * k * k * beam.intensity_ratio * s / (lorentz * lorentz);
}

double diffusion_coefficient(const LaserBeam& beam)
{
  beam.validate();
  const double k = beam.species.wavevector();
  const double s = reduced_detuning(beam.detuning, beam.species);
  return PC::hbar * PC::hbar * k * k * beam.intensity_ratio * beam.species.linewidth
         / (1.0 + s * s);
}

double bath_temperature(double detuning, const IonSpecies& species)
{
  if (!(detuning < 0.0)) {
    throw ConfigError("positive detuning: bath model requires cooling (detuning must be below zero)");
  }
  const double s = reduced_detuning(detuning, species);
  return -PC::hbar * species.linewidth / (4.0 * PC::k_B) * (1.0 + s * s) / s;
}

double doppler_limit(const IonSpecies& species)
{
  return PC::hbar * species.linewidth / (2.0 * PC::k_B);
}

double detuning_for_temperature(double temperature, const IonSpecies& species,
                                DetuningBranch branch)
{
  const double t_doppler = doppler_limit(species);
  // tau = 2 T / T_D solves s^2 + tau s + 1 = 0 with both roots negative.
  double tau = 2.0 * temperature / t_doppler;
  if (tau < 2.0) {
    if (tau < 2.0 * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "unreachable temperature: " << temperature << " K is below the Doppler limit "
          << t_doppler << " K";
      throw ConfigError(msg.str());
    }
    tau = 2.0;
  }
  const double root = std::sqrt(std::max(0.0, tau * tau - 4.0));
  // Product of the roots is 1, so the small root is formed without cancellation.
  const double s = branch == DetuningBranch::low ? -2.0 / (tau + root) : -(tau + root) / 2.0;
  return s * species.linewidth / 2.0;
}

BathAssignment assemble_bath(const ChainConfig& config, const LaserBeam& left,
                             const LaserBeam& right, int n_left, int n_right)
{
  const int n = config.sites;
  if (n_left < 0 || n_right < 0) {
    throw ConfigError("bath site counts must be non-negative");
  }
  if (n_left + n_right > n) {
    std::ostringstream msg;
    msg << "bath regions overlap: N_L + N_R = " << n_left + n_right << " exceeds N = " << n;
    throw ConfigError(msg.str());
  }
  left.validate();
  right.validate();

  BathAssignment bath;
  bath.gamma = Eigen::VectorXd::Zero(n);
  bath.diffusion = Eigen::VectorXd::Zero(n);
  const double gamma_left = friction_coefficient(left);
  const double diffusion_left = diffusion_coefficient(left);
  const double gamma_right = friction_coefficient(right);
  const double diffusion_right = diffusion_coefficient(right);
  for (int i = 0; i < n_left; ++i) {
    bath.left_sites.push_back(i);
    bath.gamma[i] = gamma_left;
    bath.diffusion[i] = diffusion_left;
  }
  for (int i = n - n_right; i < n; ++i) {
    bath.right_sites.push_back(i);
    bath.gamma[i] = gamma_right;
    bath.diffusion[i] = diffusion_right;
  }
  bath.left_temperature = bath_temperature(left.detuning, left.species);
  bath.right_temperature = bath_temperature(right.detuning, right.species);
  for (const auto* beam : {&left, &right}) {
    for (auto& w : beam->warnings()) {
      bath.warnings.push_back(std::move(w));
    }
  }
  return bath;
}

}  // namespace ionflux
