#include "ionflux/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "ionflux/errors.hpp"

namespace ionflux {

ChainConfig ScenarioSpec::chain_config() const
{
  if (!(omega1 > 0.0)) {
    throw ConfigError("omega1 must be positive");
  }
  ChainConfig config;
  config.sites = sites;
  config.species = species;
  config.lattice_constant = lattice.kind == LatticeSpec::Kind::metres
                                ? lattice.value
                                : lattice.value * characteristic_length(species, omega1);
  switch (profile) {
    case ProfileKind::graded:
      config.profile = FrequencyProfile::graded(omega1, delta_omega_ratio * omega1);
      break;
    case ProfileKind::segmented:
      config.profile = FrequencyProfile::segmented(omega1, delta_omega_ratio * omega1, split_index);
      break;
    case ProfileKind::explicit_list: {
      std::vector<double> omegas;
      omegas.reserve(omega_ratios.size());
      for (double r : omega_ratios) {
        omegas.push_back(r * omega1);
      }
      config.profile = FrequencyProfile::explicit_values(std::move(omegas));
      break;
    }
  }
  return config;
}

LaserBeam ScenarioSpec::hot_beam() const
{
  return beam_from_ratio(species, baths.intensity_ratio, baths.hot_detuning);
}

LaserBeam ScenarioSpec::cold_beam() const
{
  return beam_from_ratio(species, baths.intensity_ratio, baths.cold_detuning);
}

void ScenarioSpec::validate() const
{
  chain_config().validate();
  hot_beam().validate();
  cold_beam().validate();
  if (baths.n_left < 0 || baths.n_right < 0 || baths.n_left + baths.n_right > sites) {
    std::ostringstream msg;
    msg << "bath regions overlap or are negative: N_L = " << baths.n_left
        << ", N_R = " << baths.n_right << ", N = " << sites;
    throw ConfigError(msg.str());
  }
}

LinearizedSystem linearize(const Chain& chain, const EquilibriumState& equilibrium,
                           const BathAssignment& bath)
{
  LinearizedSystem sys;
  sys.stiffness = hessian_at(chain, equilibrium.positions);
  sys.gamma = bath.gamma / chain.units.friction();
  sys.diffusion = bath.diffusion / chain.units.diffusion();
  sys.mass = 1.0;
  sys.left_sites = bath.left_sites;
  sys.right_sites = bath.right_sites;
  return sys;
}

PreparedScenario prepare_scenario(const ScenarioSpec& spec, Bias bias,
                                  const EquilibriumOptions& options)
{
  spec.validate();
  PreparedScenario out;
  out.config = spec.chain_config();
  out.chain = Chain::from_config(out.config);
  out.equilibrium = equilibrium_positions(out.chain, options);

  const LaserBeam hot = spec.hot_beam();
  const LaserBeam cold = spec.cold_beam();
  const bool forward = bias == Bias::forward;
  out.bath = assemble_bath(out.config, forward ? hot : cold, forward ? cold : hot,
                           spec.baths.n_left, spec.baths.n_right);
  out.system = linearize(out.chain, out.equilibrium, out.bath);

  out.warnings = out.equilibrium.warnings;
  for (const auto& w : out.bath.warnings) {
    if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) {
      out.warnings.push_back(w);
    }
  }
  return out;
}

SteadyStateReport steady_state_report(const PreparedScenario& prepared, Backend backend,
                                      const SteadyStateTolerances& tolerances)
{
  SteadyStateReport report;
  report.state = solve_steady_state(prepared.system, backend, tolerances);
  report.units = prepared.chain.units;
  report.omega_ratio = prepared.chain.omega;
  report.positions_um = prepared.equilibrium.positions * (report.units.length * 1e6);
  report.temperatures_mK = report.state.temperatures * (report.units.temperature() * 1e3);
  report.site_currents_W = report.state.site_currents * report.units.power();
  report.J_L_W = report.state.currents.left * report.units.power();
  report.J_R_W = report.state.currents.right * report.units.power();
  report.left_bath_mK = prepared.bath.left_temperature * 1e3;
  report.right_bath_mK = prepared.bath.right_temperature * 1e3;
  report.equilibrium_residual = prepared.equilibrium.gradient_residual;
  report.warnings = prepared.warnings;
  return report;
}

}  // namespace ionflux
