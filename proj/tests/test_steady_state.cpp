#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ionflux/errors.hpp"
#include "ionflux/steady_state.hpp"

using namespace ionflux;

namespace {

LinearizedSystem random_chain(std::mt19937_64& rng, int n, double t_left, double t_right)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinearizedSystem sys;
  sys.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    sys.stiffness(i, i) = 1.0 + u(rng);
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double c = 0.1 + 0.3 * u(rng);
    sys.stiffness(i, i + 1) = sys.stiffness(i + 1, i) = -c;
    sys.stiffness(i, i) += c;
    sys.stiffness(i + 1, i + 1) += c;
  }
  sys.mass = 0.7 + u(rng);
  sys.gamma = Eigen::VectorXd::Zero(n);
  sys.diffusion = Eigen::VectorXd::Zero(n);
  sys.gamma[0] = 0.2 + u(rng);
  sys.diffusion[0] = sys.gamma[0] * t_left;
  sys.left_sites = {0};
  if (n > 1) {
    sys.gamma[n - 1] = 0.2 + u(rng);
    sys.diffusion[n - 1] = sys.gamma[n - 1] * t_right;
    sys.right_sites = {n - 1};
  }
  return sys;
}

// Dense Kronecker-product solve of A C + C A^T + Q = 0.
Eigen::MatrixXd kronecker_lyapunov(const LinearizedSystem& sys)
{
  const DriftNoise dn = build_drift_and_noise(sys);
  const Eigen::Index d = dn.drift.rows();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    // vec(A C) = (I kron A) vec C, vec(C A^T) = (A kron I) vec C.
    big.block(i * d, i * d, d, d) += dn.drift;
    for (Eigen::Index j = 0; j < d; ++j) {
      big.block(j * d, i * d, d, d) += dn.drift(j, i) * Eigen::MatrixXd::Identity(d, d);
    }
  }
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(dn.noise.data(), d * d);
  const Eigen::VectorXd c = big.fullPivLu().solve(-q);
  return Eigen::Map<const Eigen::MatrixXd>(c.data(), d, d);
}

LinearizedSystem single_ion(double k, double gamma, double diffusion, double mass)
{
  LinearizedSystem sys;
  sys.stiffness = Eigen::MatrixXd::Constant(1, 1, k);
  sys.gamma = Eigen::VectorXd::Constant(1, gamma);
  sys.diffusion = Eigen::VectorXd::Constant(1, diffusion);
  sys.mass = mass;
  sys.left_sites = {0};
  return sys;
}

}  // namespace

TEST_CASE("moment vector layout and round trip")
{
  CHECK(MomentVector::length(1) == 2);
  CHECK(MomentVector::length(3) == 15);
  CHECK(MomentVector::length(15) == 345);
  std::mt19937_64 rng(3);
  const LinearizedSystem sys = random_chain(rng, 4, 2.0, 1.0);
  const CovarianceMatrix c{kronecker_lyapunov(sys)};
  const MomentVector eta = pack_moments(c);
  CHECK(eta.values.size() == 26);
  CHECK(unpack_moments(eta).values.isApprox(c.values, 1e-12));
}

TEST_CASE("single ion matches the Ornstein-Uhlenbeck stationary moments")
{
  const double k = 1.7;
  const double gamma = 0.4;
  const double diffusion = 0.9;
  const double mass = 1.3;
  const LinearizedSystem sys = single_ion(k, gamma, diffusion, mass);
  const double p2 = mass * diffusion / gamma;
  for (Backend b : {Backend::moments, Backend::lyapunov}) {
    const SteadyState s = solve_steady_state(sys, b);
    CHECK(s.covariance.pp(0, 0) == doctest::Approx(p2).epsilon(1e-12));
    CHECK(s.covariance.yy(0, 0) == doctest::Approx(p2 / (mass * k)).epsilon(1e-12));
    CHECK(std::abs(s.covariance.yp(0, 0)) < 1e-14);
    CHECK(s.temperatures[0] == doctest::Approx(diffusion / gamma).epsilon(1e-12));
    CHECK(std::abs(bath_site_current(sys, s.covariance, 0)) < 1e-12);
  }
}

TEST_CASE("both backends agree with a Kronecker-product oracle")
{
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const LinearizedSystem sys = random_chain(rng, n, 3.0, 0.5);
      const Eigen::MatrixXd oracle = kronecker_lyapunov(sys);
      const double scale = oracle.cwiseAbs().maxCoeff();
      const Eigen::MatrixXd a = unpack_moments(solve_moments_paper(sys).moments).values;
      const Eigen::MatrixXd b = solve_moments_lyapunov(sys).covariance.values;
      CHECK((a - oracle).cwiseAbs().maxCoeff() / scale < 1e-10);
      CHECK((b - oracle).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
  }
}

TEST_CASE("equal baths give the Gibbs covariance")
{
  std::mt19937_64 rng(5);
  const double t = 1.6;
  const LinearizedSystem sys = random_chain(rng, 6, t, t);
  const SteadyState s = solve_steady_state(sys);
  const Eigen::MatrixXd kinv = sys.stiffness.inverse();
  const int n = sys.size();
  CHECK((s.covariance.values.topLeftCorner(n, n) - t * kinv).cwiseAbs().maxCoeff() < 1e-10 * t);
  CHECK((s.covariance.values.bottomRightCorner(n, n) - t * sys.mass * Eigen::MatrixXd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff()
        < 1e-10 * t);
  CHECK(std::abs(s.currents.left) < 1e-10 * sys.diffusion.maxCoeff() / sys.mass);
  CHECK(std::abs(s.currents.right) < 1e-10 * sys.diffusion.maxCoeff() / sys.mass);
}

TEST_CASE("heat flows from the hotter bath")
{
  std::mt19937_64 rng(9);
  const LinearizedSystem sys = random_chain(rng, 5, 4.0, 1.0);
  const SteadyState s = solve_steady_state(sys);
  CHECK(s.currents.left > 0.0);
  CHECK(s.currents.right < 0.0);
  CHECK(s.energy_balance < 1e-12);
  CHECK(s.temperatures[0] > s.temperatures[4]);
  for (int i = 1; i < 4; ++i) {
    CHECK(s.site_currents[i] == 0.0);
  }
}

TEST_CASE("exchange and bath forms of the site current agree at stationarity")
{
  std::mt19937_64 rng(21);
  const LinearizedSystem sys = random_chain(rng, 4, 2.5, 0.7);
  const CovarianceMatrix c = solve_steady_state(sys).covariance;
  for (int s : {0, 3}) {
    CHECK(exchange_site_current(sys, c, s)
          == doctest::Approx(bath_site_current(sys, c, s)).epsilon(1e-9));
  }
}

TEST_CASE("mirroring the chain and swapping the baths exchanges the currents")
{
  std::mt19937_64 rng(13);
  const LinearizedSystem sys = random_chain(rng, 5, 3.0, 1.0);
  const int n = sys.size();
  LinearizedSystem mirror = sys;
  for (int i = 0; i < n; ++i) {
    mirror.gamma[i] = sys.gamma[n - 1 - i];
    mirror.diffusion[i] = sys.diffusion[n - 1 - i];
    for (int j = 0; j < n; ++j) {
      mirror.stiffness(i, j) = sys.stiffness(n - 1 - i, n - 1 - j);
    }
  }
  const SteadyState a = solve_steady_state(sys);
  const SteadyState b = solve_steady_state(mirror);
  CHECK(b.currents.left == doctest::Approx(a.currents.right).epsilon(1e-11));
  CHECK(b.currents.right == doctest::Approx(a.currents.left).epsilon(1e-11));
}

TEST_CASE("rectification factor")
{
  CHECK(rectification_factor(1.0, 1.0) == 0.0);
  CHECK(rectification_factor(2.0, 0.0) == 1.0);
  CHECK(rectification_factor(0.0, 3.0) == -1.0);
  CHECK(rectification_factor(1.0, 2.0) == -0.5);
  CHECK_THROWS_WITH_AS(rectification_factor(0.0, 0.0), doctest::Contains("rectification undefined"), SolverError);
  CHECK_THROWS_AS(rectification_factor(-1.0, 2.0), SolverError);
}

TEST_CASE("stationarity residuals separate exact and perturbed moments")
{
  std::mt19937_64 rng(17);
  const LinearizedSystem sys = random_chain(rng, 5, 2.0, 1.0);
  const SteadyState s = solve_steady_state(sys);
  const double scale = std::abs(s.currents.left);
  CHECK(stationarity_residuals(sys, s.covariance).cwiseAbs().maxCoeff() < 1e-10 * scale);

  std::normal_distribution<double> noise(0.0, 0.01);
  MomentVector eta = pack_moments(s.covariance);
  for (Eigen::Index i = 0; i < eta.values.size(); ++i) {
    eta.values[i] *= 1.0 + noise(rng);
  }
  CHECK(stationarity_residuals(sys, unpack_moments(eta)).cwiseAbs().maxCoeff() > 1e-4 * scale);

  const MomentSystem ms = build_moment_system(sys);
  const Eigen::VectorXd exact = pack_moments(s.covariance).values;
  CHECK((ms.matrix * exact - ms.rhs).norm() < 1e-10 * ms.rhs.norm());
  CHECK((ms.matrix * eta.values - ms.rhs).norm() > 1e-4 * ms.rhs.norm());
}

TEST_CASE("no noise gives vanishing moments")
{
  LinearizedSystem sys = single_ion(1.0, 0.5, 0.0, 1.0);
  const SteadyState s = solve_steady_state(sys);
  CHECK(s.covariance.values.isZero(0.0));
  CHECK(solve_moments_lyapunov(sys).covariance.values.isZero(1e-300));
}

TEST_CASE("undamped or unstable systems are rejected")
{
  LinearizedSystem sys = single_ion(1.0, 0.0, 0.0, 1.0);
  CHECK_THROWS_WITH_AS(solve_steady_state(sys), doctest::Contains("no dissipation: stationary state undefined"),
                       SolverError);
  sys = single_ion(-1.0, 0.5, 0.5, 1.0);
  CHECK_THROWS_WITH_AS(solve_steady_state(sys, Backend::lyapunov), doctest::Contains("unstable"), SolverError);

  // A normal mode with no amplitude on the bathed site is never damped.
  LinearizedSystem hidden;
  hidden.stiffness = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  hidden.gamma = Eigen::VectorXd::Zero(3);
  hidden.diffusion = Eigen::VectorXd::Zero(3);
  hidden.gamma[0] = 0.5;
  hidden.diffusion[0] = 0.5;
  hidden.left_sites = {0};
  CHECK_THROWS_WITH_AS(solve_moments_paper(hidden), doctest::Contains("not damped"), SolverError);
  CHECK_THROWS_WITH_AS(solve_moments_lyapunov(hidden), doctest::Contains("not damped"), SolverError);
}

TEST_CASE("inconsistent dimensions are a configuration error")
{
  LinearizedSystem sys = single_ion(1.0, 0.5, 0.5, 1.0);
  sys.diffusion = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(solve_steady_state(sys), ConfigError);
  sys = single_ion(1.0, 0.5, 0.5, 1.0);
  sys.right_sites = {4};
  CHECK_THROWS_AS(solve_steady_state(sys), ConfigError);
}

TEST_CASE("undamped drift has imaginary eigenvalues")
{
  LinearizedSystem sys = single_ion(4.0, 0.0, 0.0, 1.0);
  const Eigen::VectorXcd ev = build_drift_and_noise(sys).drift.eigenvalues();
  CHECK(std::abs(ev[0].real()) < 1e-14);
  CHECK(std::abs(std::abs(ev[0].imag()) - 2.0) < 1e-14);
}
