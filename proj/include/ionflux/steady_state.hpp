#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ionflux {

/// Harmonic chain y' = p/m, p' = -K y - (gamma/m) p + xi, in any consistent units.
struct LinearizedSystem
{
  Eigen::MatrixXd stiffness;  // K
  Eigen::VectorXd gamma;
  Eigen::VectorXd diffusion;
  double mass = 1.0;
  std::vector<int> left_sites;
  std::vector<int> right_sites;

  int size() const { return static_cast<int>(gamma.size()); }

  /// Dimension checks only; physical preconditions are checked by the solvers.
  void validate() const;
};

/// Drift A and noise Q of dz = A z dt + dW, z = (y, p), <dW dW^T> = Q dt.
struct DriftNoise
{
  Eigen::MatrixXd drift;
  Eigen::MatrixXd noise;
};

DriftNoise build_drift_and_noise(const LinearizedSystem& sys);

/// Second moments over the state (y_1..y_N, p_1..p_N).
struct CovarianceMatrix
{
  Eigen::MatrixXd values;

  int sites() const { return static_cast<int>(values.rows() / 2); }
  double yy(int n, int m) const { return values(n, m); }
  double pp(int n, int m) const { return values(sites() + n, sites() + m); }
  double yp(int n, int m) const { return values(n, sites() + m); }
};

/// Independent moments, packed as
/// [<y1 y1>, <y1 y2>, ..., <yN yN>, <p1 p1>, ..., <pN pN>, <y1 p2>, ..., <y_{N-1} pN>].
struct MomentVector
{
  Eigen::VectorXd values;
  int sites = 0;

  static std::size_t length(int sites);
  static Eigen::Index yy_index(int sites, int n, int m);
  static Eigen::Index pp_index(int sites, int n, int m);
  /// n < m only; <y_m p_n> = -<y_n p_m> and <y_n p_n> = 0.
  static Eigen::Index yp_index(int sites, int n, int m);
};

MomentVector pack_moments(const CovarianceMatrix& cov);
CovarianceMatrix unpack_moments(const MomentVector& eta);

struct MomentSolution
{
  MomentVector moments;
  double relative_residual = 0.0;   // ||A eta - B|| / ||B||
  double condition_estimate = 0.0;  // 1 / rcond of the LU factors
};

struct CovarianceSolution
{
  CovarianceMatrix covariance;
  double relative_residual = 0.0;  // ||A C + C A^T + Q|| / ||Q||
};

/// Assembles the N(3N+1)/2 stationarity conditions of the independent
/// moments and solves them with a pivoted LU factorization.
MomentSolution solve_moments_paper(const LinearizedSystem& sys);

/// Solves A C + C A^T + Q = 0 by complex Schur decomposition of the drift.
CovarianceSolution solve_moments_lyapunov(const LinearizedSystem& sys);

/// Assembled moment system, exposed for diagnostics and tests.
struct MomentSystem
{
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};
MomentSystem build_moment_system(const LinearizedSystem& sys);

/// k_B T_n = <p_n^2> / m, in the energy unit of the system.
Eigen::VectorXd local_temperatures(const CovarianceMatrix& cov, const LinearizedSystem& sys);

/// Mean power injected by the bath at site n: (D_n - gamma_n <p_n^2>/m) / m.
double bath_site_current(const LinearizedSystem& sys, const CovarianceMatrix& cov, int site);

/// The same power written as sum_l K_nl <y_l p_n> / m, which holds once <p_n^2>
/// is stationary. Used for reported currents: the bath form cancels to a few
/// digits when the current is small compared with D_n / m.
double exchange_site_current(const LinearizedSystem& sys, const CovarianceMatrix& cov, int site);

struct BathCurrents
{
  double left = 0.0;
  double right = 0.0;
};

/// Sums of exchange_site_current over the left and right bath sites.
BathCurrents total_currents(const LinearizedSystem& sys, const CovarianceMatrix& cov);

/// (J_fwd - J_bwd) / max(J_fwd, J_bwd) for non-negative current magnitudes.
double rectification_factor(double forward, double backward);

/// Per-site d<H_n>/dt = <j_n^B> + <dH_n^int/dt> with the harmonic local energy
/// H_n = p_n^2/2m + y_n (K y)_n / 2. Zero for an exact stationary solution.
Eigen::VectorXd stationarity_residuals(const LinearizedSystem& sys, const CovarianceMatrix& cov);

enum class Backend
{
  moments,
  lyapunov,
};

struct SteadyStateTolerances
{
  double energy_balance = 1e-8;
  double moment_residual = 1e-10;

  bool operator==(const SteadyStateTolerances&) const = default;
};

/// Solved stationary state in the units of the system.
struct SteadyState
{
  CovarianceMatrix covariance;
  Eigen::VectorXd temperatures;   // k_B T_n
  Eigen::VectorXd site_currents;  // <j_n^B>
  BathCurrents currents;
  double moment_residual = 0.0;
  double condition_estimate = 0.0;
  double stationarity_residual = 0.0;  // max |residual| / max |J|
  double energy_balance = 0.0;         // |J_L + J_R| / max(|J_L|, |J_R|)
};

/// Solves with the chosen backend and checks energy balance. Throws
/// SolverError when |J_L + J_R| exceeds the tolerance.
SteadyState solve_steady_state(const LinearizedSystem& sys, Backend backend = Backend::moments,
                               const SteadyStateTolerances& tolerances = {});

}  // namespace ionflux
