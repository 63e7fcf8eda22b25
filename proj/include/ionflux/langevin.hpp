#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ionflux/chain.hpp"
#include "ionflux/parallel.hpp"
#include "ionflux/scenario.hpp"
#include "ionflux/steady_state.hpp"

namespace ionflux {

enum class Scheme
{
  semi_implicit_euler_maruyama,
  // Half Ornstein-Uhlenbeck step, velocity Verlet, half Ornstein-Uhlenbeck step.
  stochastic_leapfrog,
};

/// Step size, horizon and sampling, all in the time unit of the model.
struct IntegratorConfig
{
  double dt = 0.0;
  double t_end = 0.0;
  double burn_in = 0.0;
  Scheme scheme = Scheme::stochastic_leapfrog;
  int sample_stride = 10;   // steps between moment samples
  int series_stride = 100;  // steps per bath-power bin
  // Each Gaussian increment is the normalized sum of this many draws. A run
  // with step dt and k draws sees the same Brownian path as a run with step
  // dt/2 and k/2 draws started from the same seed.
  int noise_substeps = 1;
  bool record_energy = false;

  /// Throws ConfigError unless dt <= 0.05 / omega_max and 0 <= burn_in < t_end.
  void validate(double omega_max) const;
};

/// Defaults scaled by the model: dt = dt_factor / omega_max,
/// burn_in = burn_in_factor * tau, t_end = t_end_factor * tau, where tau is the
/// slowest relaxation time of the linearized drift.
struct IntegratorFactors
{
  double dt_factor = 0.02;
  double burn_in_factor = 8.0;
  double t_end_factor = 16.0;

  bool operator==(const IntegratorFactors&) const = default;
};

/// Equations of motion for the stochastic integrator, in natural units.
class LangevinModel
{
public:
  /// Full Coulomb chain around its equilibrium; friction and noise from `bathed`.
  static LangevinModel nonlinear(const Chain& chain, const EquilibriumState& equilibrium,
                                 const LinearizedSystem& bathed);
  /// Harmonic dynamics with force -K y.
  static LangevinModel linear(const LinearizedSystem& sys);

  int size() const { return system_.size(); }
  bool is_nonlinear() const { return nonlinear_; }
  const LinearizedSystem& system() const { return system_; }

  /// Force at displacement y from equilibrium; throws SolverError when ions cross.
  void force(const Eigen::VectorXd& y, Eigen::VectorXd& out) const;
  /// Potential energy relative to the equilibrium configuration.
  double potential_energy(const Eigen::VectorXd& y) const;

  double omega_max() const { return omega_max_; }
  /// 1 / (slowest decay rate of the linearized drift); infinite without damping.
  double relaxation_time() const { return relaxation_time_; }
  /// Displacements beyond 1e3 times this length count as a blow-up.
  double length_scale() const { return length_scale_; }

  IntegratorConfig default_integrator(const IntegratorFactors& factors = {},
                                      Scheme scheme = Scheme::stochastic_leapfrog) const;

private:
  LinearizedSystem system_;
  bool nonlinear_ = false;
  Eigen::VectorXd omega_sq_;
  Eigen::VectorXd centers_;
  Eigen::VectorXd equilibrium_;
  double equilibrium_energy_ = 0.0;
  double omega_max_ = 0.0;
  double relaxation_time_ = 0.0;
  double length_scale_ = 1.0;

  void finish_setup();
};

struct InitialState
{
  Eigen::VectorXd y;
  Eigen::VectorXd p;
};

/// Time averages of one trajectory after burn-in, plus binned bath power.
struct TrajectoryStats
{
  long samples = 0;
  Eigen::VectorXd mean;       // of z = (y, p)
  Eigen::MatrixXd comoment;   // sum of (z - mean)(z - mean)^T, Welford update
  Eigen::VectorXd site_power;  // mean bath power per site
  double left_power = 0.0;
  double right_power = 0.0;
  double bin_time = 0.0;
  std::vector<double> series_left;   // bath power per bin over the whole run
  std::vector<double> series_right;
  std::vector<double> energy;        // mechanical energy at each bin end (record_energy)
  Eigen::VectorXd final_y;
  Eigen::VectorXd final_p;

  /// Time-averaged <z z^T>.
  Eigen::MatrixXd second_moments() const;
};

TrajectoryStats simulate_trajectory(const LangevinModel& model, const IntegratorConfig& integ,
                                    std::uint64_t seed,
                                    const std::optional<InitialState>& initial = std::nullopt);

struct EnsembleSpec
{
  int n_trials = 1000;
  std::uint64_t master_seed = 1;

  void validate() const;

  bool operator==(const EnsembleSpec&) const = default;
};

/// Counter-based seed for trajectory `index`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

/// Ensemble means with standard errors from the between-trajectory spread.
/// Standard errors are NaN for a single trajectory.
struct EnsembleEstimate
{
  int trials = 0;
  Eigen::MatrixXd moments;  // <z z^T>
  Eigen::MatrixXd moments_se;
  Eigen::VectorXd temperatures;  // <p_n^2>/m
  Eigen::VectorXd temperatures_se;
  Eigen::VectorXd site_currents;
  Eigen::VectorXd site_currents_se;
  double J_L = 0.0;
  double J_L_se = 0.0;
  double J_R = 0.0;
  double J_R_se = 0.0;
  double J_sum = 0.0;
  double J_sum_se = 0.0;
};

struct CurrentSeries
{
  std::vector<double> time;
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> total;
};

struct EnsembleResult
{
  EnsembleEstimate estimate;
  CurrentSeries series;  // ensemble mean per bin
};

EnsembleResult run_ensemble(const LangevinModel& model, const IntegratorConfig& integ,
                            const EnsembleSpec& ensemble, int threads = worker_count());

EnsembleEstimate ensemble_moments(const LangevinModel& model, const IntegratorConfig& integ,
                                  const EnsembleSpec& ensemble, int threads = worker_count());

/// Ensemble-mean bath currents versus time, smoothed by a centred sliding
/// window of `window_bins` bins.
CurrentSeries current_time_series(const LangevinModel& model, const IntegratorConfig& integ,
                                  const EnsembleSpec& ensemble, int window_bins = 1,
                                  int threads = worker_count());

CurrentSeries sliding_average(const CurrentSeries& series, int window_bins);

struct LangevinSettings
{
  IntegratorFactors factors;
  Scheme scheme = Scheme::stochastic_leapfrog;
  int sample_stride = 10;
  int series_stride = 100;
  int window_bins = 1;
  bool linearized = false;  // integrate the harmonic approximation instead of the full chain

  bool operator==(const LangevinSettings&) const = default;
};

/// Ensemble result converted to presentation units.
struct LangevinReport
{
  EnsembleResult result;  // natural units
  IntegratorConfig integrator;
  Units units;
  Eigen::VectorXd omega_ratio;
  Eigen::VectorXd temperatures_mK;
  Eigen::VectorXd temperatures_se_mK;
  Eigen::VectorXd site_currents_W;
  Eigen::VectorXd site_currents_se_W;
  double J_L_W = 0.0;
  double J_L_se_W = 0.0;
  double J_R_W = 0.0;
  double J_R_se_W = 0.0;
  CurrentSeries series_W;  // time in microseconds
  std::vector<std::string> warnings;
};

LangevinModel make_langevin_model(const PreparedScenario& prepared, bool linearized = false);

LangevinReport langevin_report(const PreparedScenario& prepared, const LangevinSettings& settings,
                               const EnsembleSpec& ensemble, int threads = worker_count());

}  // namespace ionflux
