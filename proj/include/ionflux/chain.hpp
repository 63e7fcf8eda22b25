#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionflux/constants.hpp"

namespace ionflux {

enum class ProfileKind
{
  graded,
  segmented,
  explicit_list,
};

/// Trap-frequency profile along the chain (rad/s).
struct FrequencyProfile
{
  ProfileKind kind = ProfileKind::graded;
  double omega1 = 0.0;
  double delta_omega = 0.0;
  // Number of leading sites held at omega1 in a segmented chain; ceil(N/2) when unset.
  std::optional<int> split_index;
  std::vector<double> omegas;  // explicit_list only

  static FrequencyProfile graded(double omega1, double delta_omega);
  static FrequencyProfile segmented(double omega1, double delta_omega,
                                    std::optional<int> split_index = std::nullopt);
  static FrequencyProfile explicit_values(std::vector<double> omegas);

  /// Frequency of the first site; the time unit of the chain.
  double reference_frequency() const;
};

/// Per-site frequencies omega_n for an N-site chain.
std::vector<double> materialize_frequencies(const FrequencyProfile& profile, int sites);

/// l = (q^2 / (4 pi eps0 m omega1^2))^(1/3), in metres.
double characteristic_length(const IonSpecies& species, double omega1);

/// Physical description of the chain in SI units.
struct ChainConfig
{
  int sites = 1;
  IonSpecies species;
  double lattice_constant = 0.0;  // a, metres
  FrequencyProfile profile;

  /// x_n^(0) = n a, n = 1..N.
  std::vector<double> trap_centers() const;

  void validate() const;
};

/// Nondimensional chain: unit mass, unit Coulomb constant, lengths in l,
/// times in 1/omega_1.
struct Chain
{
  Units units;
  Eigen::VectorXd omega;    // omega_n / omega_1
  Eigen::VectorXd centers;  // x_n^(0) / l
  double lattice = 1.0;     // a / l

  static Chain from_config(const ChainConfig& config);

  int size() const { return static_cast<int>(omega.size()); }

  /// Site order reversed and reflected about the chain midpoint.
  Chain mirrored() const;
};

/// Harmonic trap energy plus pairwise Coulomb energy at positions x.
double total_potential(const Chain& chain, const Eigen::VectorXd& x);

/// dV/dx_n. Throws SingularityError unless x is strictly increasing.
Eigen::VectorXd potential_gradient(const Chain& chain, const Eigen::VectorXd& x);

/// K_nm = d^2 V / dx_n dx_m at x.
Eigen::MatrixXd hessian_at(const Chain& chain, const Eigen::VectorXd& x);

/// Cholesky-based check.
bool is_positive_definite(const Eigen::MatrixXd& matrix);

struct EquilibriumOptions
{
  double tolerance = 1e-12;  // Euclidean norm of the gradient
  int max_iterations = 200;
  int max_halvings = 60;

  bool operator==(const EquilibriumOptions&) const = default;
};

struct EquilibriumState
{
  Eigen::VectorXd positions;
  double gradient_residual = 0.0;
  bool ordered = true;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Damped Newton iteration from the trap centres. Steps that break the
/// ordering or increase both energy and residual are halved.
EquilibriumState equilibrium_positions(const Chain& chain, const EquilibriumOptions& options = {});

}  // namespace ionflux
