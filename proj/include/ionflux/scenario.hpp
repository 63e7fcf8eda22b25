#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionflux/baths.hpp"
#include "ionflux/chain.hpp"
#include "ionflux/steady_state.hpp"

namespace ionflux {

/// Lattice constant given either in metres or in units of l(omega_1).
struct LatticeSpec
{
  enum class Kind
  {
    metres,
    characteristic_lengths,
  };
  Kind kind = Kind::characteristic_lengths;
  double value = 0.0;

  static LatticeSpec in_metres(double a) { return {Kind::metres, a}; }
  static LatticeSpec in_lengths(double a_over_l) { return {Kind::characteristic_lengths, a_over_l}; }

  bool operator==(const LatticeSpec&) const = default;
};

/// The two molasses settings; detunings in units of the linewidth.
struct BathSpec
{
  double hot_detuning = -0.02;
  double cold_detuning = -0.1;
  double intensity_ratio = 0.08;
  int n_left = 3;
  int n_right = 3;

  bool operator==(const BathSpec&) const = default;
};

/// Which end the hot bath sits on.
enum class Bias
{
  forward,  // T_L = T_H, T_R = T_C
  reverse,  // T_L = T_C, T_R = T_H
};

/// Everything needed to build one bathed chain.
struct ScenarioSpec
{
  IonSpecies species = magnesium24();
  int sites = 15;
  double omega1 = 0.0;  // rad/s
  ProfileKind profile = ProfileKind::graded;
  double delta_omega_ratio = 0.0;  // delta_omega / omega_1
  std::optional<int> split_index;
  std::vector<double> omega_ratios;  // explicit profiles only
  LatticeSpec lattice;
  BathSpec baths;

  ChainConfig chain_config() const;
  LaserBeam hot_beam() const;
  LaserBeam cold_beam() const;
  void validate() const;

  bool operator==(const ScenarioSpec&) const = default;
};

/// A chain linearized about its equilibrium with baths attached.
struct PreparedScenario
{
  ChainConfig config;
  Chain chain;
  EquilibriumState equilibrium;
  BathAssignment bath;        // SI
  LinearizedSystem system;    // natural units of `chain`
  std::vector<std::string> warnings;
};

PreparedScenario prepare_scenario(const ScenarioSpec& spec, Bias bias,
                                  const EquilibriumOptions& options = {});

/// Converts an SI bath assignment into the natural units of a chain.
LinearizedSystem linearize(const Chain& chain, const EquilibriumState& equilibrium,
                           const BathAssignment& bath);

/// Steady state in presentation units.
struct SteadyStateReport
{
  SteadyState state;  // natural units
  Units units;
  Eigen::VectorXd omega_ratio;
  Eigen::VectorXd positions_um;
  Eigen::VectorXd temperatures_mK;
  Eigen::VectorXd site_currents_W;
  double J_L_W = 0.0;
  double J_R_W = 0.0;
  double left_bath_mK = 0.0;
  double right_bath_mK = 0.0;
  double equilibrium_residual = 0.0;
  std::vector<std::string> warnings;
};

SteadyStateReport steady_state_report(const PreparedScenario& prepared,
                                      Backend backend = Backend::moments,
                                      const SteadyStateTolerances& tolerances = {});

}  // namespace ionflux
