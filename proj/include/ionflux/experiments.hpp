#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionflux/langevin.hpp"
#include "ionflux/scenario.hpp"

namespace ionflux {

enum class SweepParameter
{
  delta_omega_ratio,  // delta_omega / omega_1
  lattice_ratio,      // a / l
  omega1,             // omega_1 / 2 pi, Hz
  sites,              // N
  profile,            // 0 graded, 1 segmented
};

std::string_view parameter_name(SweepParameter parameter);
/// Throws ConfigError for names outside the whitelist.
SweepParameter parse_parameter(std::string_view name);

struct SweepAxis
{
  SweepParameter parameter = SweepParameter::delta_omega_ratio;
  std::vector<double> values;

  /// Nonempty, strictly monotone, and admissible for the parameter.
  void validate() const;

  bool operator==(const SweepAxis&) const = default;
};

/// Evenly spaced grid including both ends.
std::vector<double> linear_grid(double first, double last, int points);

/// Returns `base` with one parameter overridden.
ScenarioSpec apply_parameter(ScenarioSpec base, SweepParameter parameter, double value);

enum class SolverKind
{
  algebraic,
  langevin,
};

struct SolverOptions
{
  SolverKind kind = SolverKind::algebraic;
  Backend backend = Backend::moments;
  SteadyStateTolerances tolerances;
  LangevinSettings langevin;
  EnsembleSpec ensemble;
  int threads = 0;  // 0: worker_count()

  bool operator==(const SolverOptions&) const = default;
};

struct BiasPair
{
  double forward = 0.0;   // |J| into the chain from the hot bath, hot on the left (W)
  double backward = 0.0;  // same with the hot bath on the right (W)
  double rectification = 0.0;
  double energy_balance = 0.0;  // worst of the two solves (algebraic only)
  std::vector<std::string> warnings;
};

/// Two solves with the beams swapped. Errors from either solve are rethrown
/// with the bias direction prepended.
BiasPair run_bias_pair(const ScenarioSpec& spec, const SolverOptions& solver);

struct SweepSpec
{
  ScenarioSpec base;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  SolverOptions solver;

  void validate() const;
};

struct SweepRow
{
  std::vector<double> parameters;  // one entry per axis
  double J_forward = 0.0;
  double J_backward = 0.0;
  double R = 0.0;
  std::string status = "ok";
  double energy_balance = 0.0;
  std::vector<std::string> warnings;

  bool ok() const { return status == "ok"; }
  /// max(J_forward, J_backward)
  double max_flux() const;
};

struct SweepResult
{
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;  // axis1 varies fastest
};

/// Evaluates every grid point; failures are recorded in the row.
SweepResult run_sweep(const SweepSpec& spec);

/// Single-axis sweep over delta_omega_ratio.
SweepResult sweep_gradient(const SweepSpec& spec);

/// Two-axis map over delta_omega_ratio (axis1) and lattice_ratio (axis2).
SweepResult sweep_map(const SweepSpec& spec);

/// Linearly interpolated sign changes of R along axis1 of a single-axis
/// sweep. Failed rows and rows at a zero gradient are skipped.
std::vector<double> find_zero_crossings(const SweepResult& result);

struct ProfileComparison
{
  SweepResult graded;
  SweepResult segmented;
};

/// Gradient sweeps of the graded and segmented variants of one base chain.
ProfileComparison compare_profiles(const ScenarioSpec& base, const std::vector<double>& gradients,
                                   const SolverOptions& solver);

}  // namespace ionflux
