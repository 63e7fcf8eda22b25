#include "ionflux/chain.hpp"

#include <cmath>
#include <sstream>

#include "ionflux/errors.hpp"

namespace ionflux {

FrequencyProfile FrequencyProfile::graded(double omega1, double delta_omega)
{
  FrequencyProfile p;
  p.kind = ProfileKind::graded;
  p.omega1 = omega1;
  p.delta_omega = delta_omega;
  return p;
}

FrequencyProfile FrequencyProfile::segmented(double omega1, double delta_omega,
                                             std::optional<int> split_index)
{
  FrequencyProfile p;
  p.kind = ProfileKind::segmented;
  p.omega1 = omega1;
  p.delta_omega = delta_omega;
  p.split_index = split_index;
  return p;
}

FrequencyProfile FrequencyProfile::explicit_values(std::vector<double> omegas)
{
  FrequencyProfile p;
  p.kind = ProfileKind::explicit_list;
  p.omegas = std::move(omegas);
  p.omega1 = p.omegas.empty() ? 0.0 : p.omegas.front();
  return p;
}

double FrequencyProfile::reference_frequency() const
{
  if (kind == ProfileKind::explicit_list) {
    return omegas.empty() ? 0.0 : omegas.front();
  }
  return omega1;
}

std::vector<double> materialize_frequencies(const FrequencyProfile& profile, int sites)
{
  if (sites < 1) {
    throw ConfigError("chain must contain at least one site");
  }
  std::vector<double> omegas(static_cast<std::size_t>(sites));
  switch (profile.kind) {
    case ProfileKind::graded:
      for (int n = 0; n < sites; ++n) {
        // A single site has no gradient to spread.
        omegas[n] = sites == 1 ? profile.omega1
                               : profile.omega1 + profile.delta_omega * n / (sites - 1);
      }
      // The last trap sits exactly at omega1 + delta_omega.
      if (sites > 1) {
        omegas.back() = profile.omega1 + profile.delta_omega;
      }
      break;
    case ProfileKind::segmented: {
      if (sites < 2) {
        throw ConfigError("segmented profile needs at least two sites");
      }
      const int split = profile.split_index.value_or((sites + 1) / 2);
      if (split < 0 || split > sites) {
        throw ConfigError("segmented split index " + std::to_string(split)
                          + " outside [0, " + std::to_string(sites) + "]");
      }
      for (int n = 0; n < sites; ++n) {
        omegas[n] = n < split ? profile.omega1 : profile.omega1 + profile.delta_omega;
      }
      break;
    }
    case ProfileKind::explicit_list:
      if (static_cast<int>(profile.omegas.size()) != sites) {
        throw ConfigError("explicit profile has " + std::to_string(profile.omegas.size())
                          + " frequencies for " + std::to_string(sites) + " sites");
      }
      omegas = profile.omegas;
      break;
  }
  for (int n = 0; n < sites; ++n) {
    if (!(omegas[n] > 0.0) || !std::isfinite(omegas[n])) {
      std::ostringstream msg;
      msg << "trap frequency at site " << n + 1 << " is not positive (" << omegas[n] << ")";
      throw ConfigError(msg.str());
    }
  }
  return omegas;
}

double characteristic_length(const IonSpecies& species, double omega1)
{
  if (!(omega1 > 0.0)) {
    throw ConfigError("characteristic length needs a positive trap frequency");
  }
  return std::cbrt(species.coulomb_constant() / (species.mass * omega1 * omega1));
}

std::vector<double> ChainConfig::trap_centers() const
{
  std::vector<double> centers(static_cast<std::size_t>(sites));
  for (int n = 0; n < sites; ++n) {
    centers[n] = (n + 1) * lattice_constant;
  }
  return centers;
}

void ChainConfig::validate() const
{
  if (sites < 1) {
    throw ConfigError("chain must contain at least one site");
  }
  if (!(lattice_constant > 0.0)) {
    throw ConfigError("lattice constant must be positive");
  }
  species.validate();
  materialize_frequencies(profile, sites);
}

Chain Chain::from_config(const ChainConfig& config)
{
  config.validate();
  const auto omegas = materialize_frequencies(config.profile, config.sites);
  const double omega_ref = config.profile.reference_frequency();

  Chain chain;
  chain.units = Units::for_species(config.species, omega_ref);
  chain.lattice = config.lattice_constant / chain.units.length;
  chain.omega.resize(config.sites);
  chain.centers.resize(config.sites);
  for (int n = 0; n < config.sites; ++n) {
    chain.omega[n] = omegas[n] / omega_ref;
    chain.centers[n] = (n + 1) * chain.lattice;
  }
  return chain;
}

Chain Chain::mirrored() const
{
  Chain out = *this;
  const int n = size();
  const double span = centers[0] + centers[n - 1];
  for (int i = 0; i < n; ++i) {
    out.omega[i] = omega[n - 1 - i];
    out.centers[i] = span - centers[n - 1 - i];
  }
  return out;
}

namespace {

void require_ordered(const Eigen::VectorXd& x)
{
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      std::ostringstream msg;
      msg << "ions " << i << " and " << i + 1 << " coincide or are out of order (x = " << x[i - 1]
          << ", " << x[i] << ")";
      throw SingularityError(msg.str());
    }
  }
}

bool is_ordered(const Eigen::VectorXd& x)
{
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      return false;
    }
  }
  return true;
}

}  // namespace

double total_potential(const Chain& chain, const Eigen::VectorXd& x)
{
  require_ordered(x);
  const int n = chain.size();
  double trap = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - chain.centers[i];
    trap += 0.5 * chain.omega[i] * chain.omega[i] * dx * dx;
  }
  double coulomb = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      coulomb += 1.0 / (x[j] - x[i]);
    }
  }
  return trap + coulomb;
}

Eigen::VectorXd potential_gradient(const Chain& chain, const Eigen::VectorXd& x)
{
  require_ordered(x);
  const int n = chain.size();
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = chain.omega[i] * chain.omega[i] * (x[i] - chain.centers[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = x[j] - x[i];
      const double f = 1.0 / (d * d);
      g[i] += f;
      g[j] -= f;
    }
  }
  return g;
}

Eigen::MatrixXd hessian_at(const Chain& chain, const Eigen::VectorXd& x)
{
  require_ordered(x);
  const int n = chain.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = chain.omega[i] * chain.omega[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = x[j] - x[i];
      const double c = 2.0 / (d * d * d);
      k(i, j) = -c;
      k(j, i) = -c;
      k(i, i) += c;
      k(j, j) += c;
    }
  }
  return k;
}

bool is_positive_definite(const Eigen::MatrixXd& matrix)
{
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  return llt.info() == Eigen::Success;
}

EquilibriumState equilibrium_positions(const Chain& chain, const EquilibriumOptions& options)
{
  EquilibriumState state;
  if (chain.lattice < 1.0) {
    std::ostringstream msg;
    msg << "lattice constant a = " << chain.lattice
        << " l is below the characteristic length; Coulomb repulsion exceeds trap confinement";
    state.warnings.push_back(msg.str());
  }

  Eigen::VectorXd x = chain.centers;
  Eigen::VectorXd g = potential_gradient(chain, x);
  double energy = total_potential(chain, x);
  double residual = g.norm();

  int iteration = 0;
  while (residual > options.tolerance) {
    if (iteration == options.max_iterations) {
      std::ostringstream msg;
      msg << "equilibrium solver did not converge after " << iteration
          << " iterations (gradient residual " << residual << ")";
      throw SolverError(msg.str());
    }
    ++iteration;

    const Eigen::MatrixXd k = hessian_at(chain, x);
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(g);
    } else {
      // Away from a minimum: diagonally scaled descent.
      step = g.cwiseQuotient(k.diagonal().cwiseAbs().cwiseMax(1.0));
    }

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, scale *= 0.5) {
      const Eigen::VectorXd trial = x - scale * step;
      if (!is_ordered(trial)) {
        continue;
      }
      const double trial_energy = total_potential(chain, trial);
      const Eigen::VectorXd trial_g = potential_gradient(chain, trial);
      const double trial_residual = trial_g.norm();
      const double slack = 1e-14 * std::max(1.0, std::abs(energy));
      if (trial_energy <= energy + slack || trial_residual < residual) {
        x = trial;
        g = trial_g;
        energy = trial_energy;
        residual = trial_residual;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "equilibrium solver stalled at iteration " << iteration << " (gradient residual "
          << residual << "): every damped step broke ordering or increased the energy";
      throw SolverError(msg.str());
    }
  }

  state.positions = x;
  state.gradient_residual = residual;
  state.ordered = is_ordered(x);
  state.iterations = iteration;
  return state;
}

}  // namespace ionflux
