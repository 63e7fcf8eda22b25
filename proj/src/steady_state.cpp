#include "ionflux/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionflux/errors.hpp"

namespace ionflux {

void LinearizedSystem::validate() const
{
  const Eigen::Index n = gamma.size();
  if (n < 1) {
    throw ConfigError("linearized system has no sites");
  }
  if (stiffness.rows() != n || stiffness.cols() != n || diffusion.size() != n) {
    throw ConfigError("linearized system dimensions are inconsistent");
  }
  if (!(mass > 0.0)) {
    throw ConfigError("linearized system mass must be positive");
  }
  for (const auto* sites : {&left_sites, &right_sites}) {
    for (int s : *sites) {
      if (s < 0 || s >= n) {
        throw ConfigError("bath site index out of range");
      }
    }
  }
}

namespace {

void require_solvable(const LinearizedSystem& sys)
{
  sys.validate();
  if ((sys.gamma.array() < 0.0).any() || (sys.diffusion.array() < 0.0).any()) {
    throw SolverError("negative friction or diffusion coefficient");
  }
  if (!(sys.gamma.array() > 0.0).any()) {
    throw SolverError("no dissipation: stationary state undefined");
  }
  const Eigen::MatrixXd& k = sys.stiffness;
  if (!k.isApprox(k.transpose(), 1e-12)) {
    throw SolverError("stiffness matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw SolverError("unstable configuration: stiffness matrix is not positive definite");
  }
}

// Currents below this are treated as zero when checking energy balance.
double diffusion_floor(const LinearizedSystem& sys)
{
  return 1e-6 * sys.diffusion.maxCoeff() / sys.mass;
}

}  // namespace

DriftNoise build_drift_and_noise(const LinearizedSystem& sys)
{
  sys.validate();
  const int n = sys.size();
  DriftNoise out;
  out.drift = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.drift.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) / sys.mass;
  out.drift.bottomLeftCorner(n, n) = -sys.stiffness;
  out.drift.bottomRightCorner(n, n) = (-sys.gamma / sys.mass).asDiagonal();
  out.noise = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.noise.bottomRightCorner(n, n) = (2.0 * sys.diffusion).asDiagonal();
  return out;
}

std::size_t MomentVector::length(int sites)
{
  const auto n = static_cast<std::size_t>(sites);
  return n * (3 * n + 1) / 2;
}

Eigen::Index MomentVector::yy_index(int sites, int n, int m)
{
  if (n > m) {
    std::swap(n, m);
  }
  return static_cast<Eigen::Index>(n) * sites - static_cast<Eigen::Index>(n) * (n - 1) / 2
         + (m - n);
}

Eigen::Index MomentVector::pp_index(int sites, int n, int m)
{
  const Eigen::Index block = static_cast<Eigen::Index>(sites) * (sites + 1) / 2;
  return block + yy_index(sites, n, m);
}

Eigen::Index MomentVector::yp_index(int sites, int n, int m)
{
  const Eigen::Index offset = static_cast<Eigen::Index>(sites) * (sites + 1);
  return offset + static_cast<Eigen::Index>(n) * (sites - 1)
         - static_cast<Eigen::Index>(n) * (n - 1) / 2 + (m - n - 1);
}

MomentVector pack_moments(const CovarianceMatrix& cov)
{
  const int n = cov.sites();
  MomentVector eta;
  eta.sites = n;
  eta.values.resize(static_cast<Eigen::Index>(MomentVector::length(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      eta.values[MomentVector::yy_index(n, i, j)] = cov.yy(i, j);
      eta.values[MomentVector::pp_index(n, i, j)] = cov.pp(i, j);
      if (j > i) {
        eta.values[MomentVector::yp_index(n, i, j)] = cov.yp(i, j);
      }
    }
  }
  return eta;
}

CovarianceMatrix unpack_moments(const MomentVector& eta)
{
  const int n = eta.sites;
  CovarianceMatrix cov;
  cov.values = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  auto& c = cov.values;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      c(i, j) = c(j, i) = eta.values[MomentVector::yy_index(n, i, j)];
      c(n + i, n + j) = c(n + j, n + i) = eta.values[MomentVector::pp_index(n, i, j)];
      if (j > i) {
        const double v = eta.values[MomentVector::yp_index(n, i, j)];
        // <y_i p_j> = v, <y_j p_i> = -v, and the (p, y) block is the transpose.
        c(i, n + j) = v;
        c(n + j, i) = v;
        c(j, n + i) = -v;
        c(n + i, j) = -v;
      }
    }
  }
  return cov;
}

MomentSystem build_moment_system(const LinearizedSystem& sys)
{
  sys.validate();
  const int n = sys.size();
  const double m = sys.mass;
  const auto& k = sys.stiffness;
  const auto size = static_cast<Eigen::Index>(MomentVector::length(n));

  MomentSystem out;
  out.matrix = Eigen::MatrixXd::Zero(size, size);
  out.rhs = Eigen::VectorXd::Zero(size);
  auto& a = out.matrix;

  // Adds coeff * <y_i p_j>, resolving the antisymmetric parametrization.
  auto add_yp = [&](Eigen::Index row, int i, int j, double coeff) {
    if (i < j) {
      a(row, MomentVector::yp_index(n, i, j)) += coeff;
    } else if (i > j) {
      a(row, MomentVector::yp_index(n, j, i)) -= coeff;
    }
  };

  Eigen::Index row = 0;
  // d<y_i p_j>/dt = <p_i p_j>/m - sum_k K_jk <y_i y_k> - (gamma_j/m) <y_i p_j> = 0
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j, ++row) {
      a(row, MomentVector::pp_index(n, i, j)) += 1.0 / m;
      add_yp(row, i, j, -sys.gamma[j] / m);
      for (int l = 0; l < n; ++l) {
        a(row, MomentVector::yy_index(n, i, l)) -= k(j, l);
      }
    }
  }
  // -d<p_i p_j>/dt = sum_k [K_ik <y_k p_j> + K_jk <y_k p_i>] + (gamma_i + gamma_j)/m <p_i p_j>
  //                  - 2 delta_ij D_i = 0
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, ++row) {
      for (int l = 0; l < n; ++l) {
        add_yp(row, l, j, k(i, l));
        add_yp(row, l, i, k(j, l));
      }
      a(row, MomentVector::pp_index(n, i, j)) += (sys.gamma[i] + sys.gamma[j]) / m;
      out.rhs[row] = i == j ? 2.0 * sys.diffusion[i] : 0.0;
    }
  }
  return out;
}

MomentSolution solve_moments_paper(const LinearizedSystem& sys)
{
  require_solvable(sys);
  const MomentSystem system = build_moment_system(sys);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  const double rcond = lu.rcond();
  double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  // The norm estimate can miss exact singularity; a vanishing pivot cannot.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double smallest = pivots.minCoeff();
  condition = std::max(condition, smallest > 0.0 ? pivots.maxCoeff() / smallest
                                                 : std::numeric_limits<double>::infinity());
  if (!(condition <= 1e14)) {
    std::ostringstream msg;
    msg << "moment system is singular or ill-conditioned (condition estimate " << condition
        << "): some normal mode is not damped by either bath";
    throw SolverError(msg.str());
  }

  Eigen::VectorXd eta = lu.solve(system.rhs);
  const double rhs_norm = std::max(system.rhs.norm(), std::numeric_limits<double>::min());
  Eigen::VectorXd r = system.rhs - system.matrix * eta;
  double relative = r.norm() / rhs_norm;
  if (relative > 1e-12) {
    eta += lu.solve(r);
    r = system.rhs - system.matrix * eta;
    relative = r.norm() / rhs_norm;
  }
  if (system.rhs.norm() == 0.0) {
    relative = r.norm();
  }

  MomentSolution out;
  out.moments.sites = sys.size();
  out.moments.values = std::move(eta);
  out.relative_residual = relative;
  out.condition_estimate = condition;
  return out;
}

CovarianceSolution solve_moments_lyapunov(const LinearizedSystem& sys)
{
  require_solvable(sys);
  const DriftNoise dn = build_drift_and_noise(sys);
  const Eigen::Index dim = dn.drift.rows();

  Eigen::ComplexSchur<Eigen::MatrixXd> schur(dn.drift);
  if (schur.info() != Eigen::Success) {
    throw SolverError("Schur decomposition of the drift matrix failed");
  }
  using CMatrix = Eigen::MatrixXcd;
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();

  const double scale = dn.drift.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(t(i, i).real() < -1e-13 * scale)) {
      std::ostringstream msg;
      msg << "drift matrix is not stable (eigenvalue " << t(i, i).real() << " + "
          << t(i, i).imag() << "i): some normal mode is not damped by either bath";
      throw SolverError(msg.str());
    }
  }

  // A C + C A^T + G = 0 via T X + X T^H = -U^H G U, column by column from the last.
  auto solve = [&](const Eigen::MatrixXd& g) {
    const CMatrix f = -(u.adjoint() * g.cast<std::complex<double>>() * u);
    CMatrix x = CMatrix::Zero(dim, dim);
    for (Eigen::Index j = dim - 1; j >= 0; --j) {
      Eigen::VectorXcd rhs = f.col(j);
      for (Eigen::Index k = j + 1; k < dim; ++k) {
        rhs -= std::conj(t(j, k)) * x.col(k);
      }
      CMatrix shifted = t;
      shifted.diagonal().array() += std::conj(t(j, j));
      x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    Eigen::MatrixXd c = (u * x * u.adjoint()).real();
    return Eigen::MatrixXd(0.5 * (c + c.transpose()));
  };

  Eigen::MatrixXd c = solve(dn.noise);
  // One refinement step on the residual.
  c += solve(dn.drift * c + c * dn.drift.transpose() + dn.noise);

  const Eigen::MatrixXd residual = dn.drift * c + c * dn.drift.transpose() + dn.noise;
  const double noise_norm = dn.noise.norm();

  CovarianceSolution out;
  out.covariance.values = std::move(c);
  out.relative_residual = noise_norm > 0.0 ? residual.norm() / noise_norm : residual.norm();
  return out;
}

Eigen::VectorXd local_temperatures(const CovarianceMatrix& cov, const LinearizedSystem& sys)
{
  const int n = cov.sites();
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) {
    t[i] = cov.pp(i, i) / sys.mass;
  }
  return t;
}

double bath_site_current(const LinearizedSystem& sys, const CovarianceMatrix& cov, int site)
{
  const double gamma = sys.gamma[site];
  const double diffusion = sys.diffusion[site];
  if (gamma == 0.0 && diffusion == 0.0) {
    return 0.0;
  }
  return (diffusion - gamma * cov.pp(site, site) / sys.mass) / sys.mass;
}

double exchange_site_current(const LinearizedSystem& sys, const CovarianceMatrix& cov, int site)
{
  if (sys.gamma[site] == 0.0 && sys.diffusion[site] == 0.0) {
    return 0.0;
  }
  double sum = 0.0;
  for (int l = 0; l < sys.size(); ++l) {
    if (l != site) {  // <y_n p_n> vanishes identically
      sum += sys.stiffness(site, l) * cov.yp(l, site);
    }
  }
  return sum / sys.mass;
}

BathCurrents total_currents(const LinearizedSystem& sys, const CovarianceMatrix& cov)
{
  BathCurrents j;
  for (int s : sys.left_sites) {
    j.left += exchange_site_current(sys, cov, s);
  }
  for (int s : sys.right_sites) {
    j.right += exchange_site_current(sys, cov, s);
  }
  return j;
}

double rectification_factor(double forward, double backward)
{
  if (forward < 0.0 || backward < 0.0 || !std::isfinite(forward) || !std::isfinite(backward)) {
    throw SolverError("rectification factor needs finite non-negative current magnitudes");
  }
  const double largest = std::max(forward, backward);
  if (largest == 0.0) {
    throw SolverError("rectification undefined: both heat currents vanish");
  }
  return (forward - backward) / largest;
}

Eigen::VectorXd stationarity_residuals(const LinearizedSystem& sys, const CovarianceMatrix& cov)
{
  const int n = sys.size();
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    double internal = 0.0;
    for (int j = 0; j < n; ++j) {
      internal += sys.stiffness(i, j) * (cov.yp(i, j) - cov.yp(j, i));
    }
    r[i] = bath_site_current(sys, cov, i) + internal / (2.0 * sys.mass);
  }
  return r;
}

SteadyState solve_steady_state(const LinearizedSystem& sys, Backend backend,
                               const SteadyStateTolerances& tolerances)
{
  SteadyState out;
  if (backend == Backend::moments) {
    const MomentSolution sol = solve_moments_paper(sys);
    out.covariance = unpack_moments(sol.moments);
    out.moment_residual = sol.relative_residual;
    out.condition_estimate = sol.condition_estimate;
  } else {
    CovarianceSolution sol = solve_moments_lyapunov(sys);
    out.covariance = std::move(sol.covariance);
    out.moment_residual = sol.relative_residual;
  }
  if (!(out.moment_residual <= tolerances.moment_residual)) {
    std::ostringstream msg;
    msg << "steady-state solve residual " << out.moment_residual << " exceeds tolerance "
        << tolerances.moment_residual;
    throw SolverError(msg.str());
  }

  const int n = sys.size();
  out.temperatures = local_temperatures(out.covariance, sys);
  out.site_currents.resize(n);
  for (int i = 0; i < n; ++i) {
    out.site_currents[i] = exchange_site_current(sys, out.covariance, i);
  }
  out.currents = total_currents(sys, out.covariance);

  const double largest = std::max(std::abs(out.currents.left), std::abs(out.currents.right));
  const double scale = std::max(largest, diffusion_floor(sys));
  const double imbalance = std::abs(out.currents.left + out.currents.right);
  const double worst_site = stationarity_residuals(sys, out.covariance).cwiseAbs().maxCoeff();
  // Without noise every moment vanishes and there is nothing to compare against.
  out.energy_balance = scale > 0.0 ? imbalance / scale : imbalance;
  out.stationarity_residual = scale > 0.0 ? worst_site / scale : worst_site;
  if (!(out.energy_balance <= tolerances.energy_balance)) {
    std::ostringstream msg;
    msg << "energy balance violated: |J_L + J_R| / max|J| = " << out.energy_balance
        << " exceeds " << tolerances.energy_balance << " (J_L = " << out.currents.left
        << ", J_R = " << out.currents.right << ")";
    throw SolverError(msg.str());
  }
  return out;
}

}  // namespace ionflux
