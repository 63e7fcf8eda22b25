#include "ionflux/validation.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "ionflux/langevin.hpp"
#include "ionflux/scenario.hpp"

namespace ionflux {

namespace {

LinearizedSystem random_system(std::mt19937_64& rng, int n)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = unit(rng) - 0.5;
    }
  }
  LinearizedSystem sys;
  sys.stiffness = m * m.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
  sys.mass = 0.5 + unit(rng);
  sys.gamma = Eigen::VectorXd::Zero(n);
  sys.diffusion = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0 || unit(rng) < 0.5) {
      sys.gamma[i] = 0.05 + unit(rng);
      sys.diffusion[i] = sys.gamma[i] * (0.5 + 1.5 * unit(rng));
    }
  }
  sys.left_sites = {0};
  if (n > 1) {
    sys.right_sites = {n - 1};
  }
  return sys;
}

// Error relative to the block's largest entry. A block that vanishes in exact
// arithmetic (y-p correlations at global equilibrium) is measured against
// `floor` instead of its own rounding noise.
double block_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor)
{
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), floor});
  if (scale == 0.0) {
    return 0.0;
  }
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

class Suite
{
public:
  void check(const std::string& name, double tolerance, const std::function<double()>& measure)
  {
    CheckResult r;
    r.name = name;
    r.tolerance = tolerance;
    try {
      r.value = measure();
      r.passed = r.value <= tolerance;
      std::ostringstream msg;
      msg << "error " << r.value << " vs tolerance " << tolerance;
      r.detail = msg.str();
    } catch (const std::exception& e) {
      r.passed = false;
      r.value = std::numeric_limits<double>::infinity();
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }

  std::vector<CheckResult> results;
};

}  // namespace

std::vector<CheckResult> run_property_suite(const ValidationOptions& options)
{
  Suite suite;
  std::mt19937_64 rng(options.seed);

  std::vector<LinearizedSystem> systems;
  for (int n = 1; n <= 8; ++n) {
    for (int k = 0; k < options.random_systems; ++k) {
      systems.push_back(random_system(rng, n));
    }
  }

  suite.check("backends agree on random systems (N <= 8)", 1e-8, [&] {
    double worst = 0.0;
    for (const auto& sys : systems) {
      const Eigen::MatrixXd a = unpack_moments(solve_moments_paper(sys).moments).values;
      const Eigen::MatrixXd b = solve_moments_lyapunov(sys).covariance.values;
      const int n = sys.size();
      const double floor = 1e-6 * a.cwiseAbs().maxCoeff();
      worst = std::max(worst, block_error(a.topLeftCorner(n, n), b.topLeftCorner(n, n), floor));
      worst = std::max(worst, block_error(a.bottomRightCorner(n, n), b.bottomRightCorner(n, n), floor));
      if (n > 1) {
        worst = std::max(worst, block_error(a.topRightCorner(n, n), b.topRightCorner(n, n), floor));
      }
    }
    return worst;
  });

  suite.check("covariance is positive semidefinite", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& sys : systems) {
      for (const Eigen::MatrixXd& c : {unpack_moments(solve_moments_paper(sys).moments).values,
                                       solve_moments_lyapunov(sys).covariance.values}) {
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues();
        worst = std::max(worst, -ev.minCoeff() / ev.maxCoeff());
      }
    }
    return worst;
  });

  suite.check("<y_n p_n> = 0 and <y_n p_l> = -<y_l p_n>", 1e-10, [&] {
    double worst = 0.0;
    for (const auto& sys : systems) {
      const CovarianceMatrix c = solve_moments_lyapunov(sys).covariance;
      const int n = sys.size();
      const double scale = c.values.cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          worst = std::max(worst, std::abs(c.yp(i, j) + c.yp(j, i)) / scale);
        }
      }
    }
    return worst;
  });

  suite.check("single ion <p^2> = m D / gamma (algebraic)", 1e-10, [&] {
    double worst = 0.0;
    for (double gamma : {0.01, 0.3, 2.0}) {
      LinearizedSystem sys;
      sys.stiffness = Eigen::MatrixXd::Constant(1, 1, 1.7);
      sys.gamma = Eigen::VectorXd::Constant(1, gamma);
      sys.diffusion = Eigen::VectorXd::Constant(1, 0.8 * gamma + 0.1);
      sys.mass = 1.3;
      sys.left_sites = {0};
      const double exact = sys.mass * sys.diffusion[0] / gamma;
      for (Backend backend : {Backend::moments, Backend::lyapunov}) {
        const SteadyState s = solve_steady_state(sys, backend);
        worst = std::max(worst, std::abs(s.covariance.pp(0, 0) - exact) / exact);
      }
    }
    return worst;
  });

  suite.check("single ion <p^2> = m D / gamma (Langevin, in standard errors)", 3.0, [&] {
    LinearizedSystem sys;
    sys.stiffness = Eigen::MatrixXd::Constant(1, 1, 1.0);
    sys.gamma = Eigen::VectorXd::Constant(1, 0.5);
    sys.diffusion = Eigen::VectorXd::Constant(1, 0.65);
    sys.left_sites = {0};
    const LangevinModel model = LangevinModel::linear(sys);
    const IntegratorConfig integ = model.default_integrator({}, Scheme::stochastic_leapfrog);
    EnsembleSpec ensemble;
    ensemble.n_trials = options.stochastic_trials;
    ensemble.master_seed = options.seed;
    const EnsembleEstimate est = ensemble_moments(model, integ, ensemble, options.threads);
    const double exact = sys.diffusion[0] / sys.gamma[0];
    return std::abs(est.moments(1, 1) - exact) / est.moments_se(1, 1);
  });

  ScenarioSpec uniform;
  uniform.sites = 9;
  uniform.omega1 = 2.0 * std::numbers::pi * 1e6;
  uniform.lattice = LatticeSpec::in_lengths(3.0);
  uniform.baths.hot_detuning = uniform.baths.cold_detuning = -0.05;

  suite.check("equal baths give a flat temperature profile", 1e-8, [&] {
    const PreparedScenario prepared = prepare_scenario(uniform, Bias::forward);
    const SteadyState s = solve_steady_state(prepared.system);
    const double bath = prepared.system.diffusion[0] / prepared.system.gamma[0];
    return (s.temperatures.array() - bath).abs().maxCoeff() / bath;
  });

  suite.check("equal baths give zero current (relative to D/m)", 1e-10, [&] {
    const PreparedScenario prepared = prepare_scenario(uniform, Bias::forward);
    const SteadyState s = solve_steady_state(prepared.system);
    const double scale = prepared.system.diffusion.maxCoeff() / prepared.system.mass;
    return std::max(std::abs(s.currents.left), std::abs(s.currents.right)) / scale;
  });

  Chain chain;
  chain.units = Units::for_species(magnesium24(), 2.0 * std::numbers::pi * 1e6);
  chain.lattice = 2.5;
  chain.omega = Eigen::VectorXd::LinSpaced(6, 1.0, 1.4);
  chain.centers = Eigen::VectorXd::LinSpaced(6, 2.5, 15.0);
  const Eigen::VectorXd x = equilibrium_positions(chain).positions
                            + 0.1 * Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);

  suite.check("analytic gradient matches finite differences", 1e-6, [&] {
    const Eigen::VectorXd g = potential_gradient(chain, x);
    Eigen::VectorXd fd(x.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd up = x;
      Eigen::VectorXd down = x;
      up[i] += h;
      down[i] -= h;
      fd[i] = (total_potential(chain, up) - total_potential(chain, down)) / (2.0 * h);
    }
    return (g - fd).norm() / std::max(g.norm(), 1.0);
  });

  suite.check("analytic Hessian matches finite differences", 1e-5, [&] {
    const Eigen::MatrixXd k = hessian_at(chain, x);
    Eigen::MatrixXd fd(x.size(), x.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd up = x;
      Eigen::VectorXd down = x;
      up[i] += h;
      down[i] -= h;
      fd.col(i) = (potential_gradient(chain, up) - potential_gradient(chain, down)) / (2.0 * h);
    }
    return (k - fd).norm() / k.norm();
  });

  suite.check("D / (gamma k_B) equals the molasses temperature", 1e-14, [&] {
    const IonSpecies mg = magnesium24();
    double worst = 0.0;
    for (double ratio : {-0.01, -0.02, -0.1, -0.5, -1.0, -3.0}) {
      const LaserBeam beam = beam_from_ratio(mg, 0.08, ratio);
      const double t = diffusion_coefficient(beam)
                       / (friction_coefficient(beam) * PhysicalConstants::k_B);
      const double expected = bath_temperature(beam.detuning, mg);
      worst = std::max(worst, std::abs(t - expected) / expected);
    }
    return worst;
  });

  return suite.results;
}

}  // namespace ionflux
