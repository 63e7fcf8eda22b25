#include "ionflux/langevin.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionflux/errors.hpp"

namespace ionflux {

void IntegratorConfig::validate(double omega_max) const
{
  std::ostringstream msg;
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    msg << "time step must be positive (dt = " << dt << ")";
  } else if (dt > 0.05 / omega_max * (1.0 + 1e-12)) {
    msg << "time step dt = " << dt << " exceeds the stability bound 0.05 / omega_max = "
        << 0.05 / omega_max;
  } else if (!(burn_in >= 0.0) || !(burn_in < t_end) || !std::isfinite(t_end)) {
    msg << "burn-in " << burn_in << " must lie in [0, t_end = " << t_end << ")";
  } else if (sample_stride < 1 || series_stride < 1 || noise_substeps < 1) {
    msg << "sampling strides and noise substeps must be at least 1";
  } else if (t_end / dt > 1e12) {
    msg << "run of " << t_end / dt << " steps is too long";
  } else {
    return;
  }
  throw ConfigError(msg.str());
}

LangevinModel LangevinModel::nonlinear(const Chain& chain, const EquilibriumState& equilibrium,
                                       const LinearizedSystem& bathed)
{
  LangevinModel model;
  model.system_ = bathed;
  model.system_.validate();
  if (bathed.size() != chain.size() || bathed.mass != 1.0) {
    throw ConfigError("bath system does not match the chain");
  }
  model.nonlinear_ = true;
  model.omega_sq_ = chain.omega.cwiseProduct(chain.omega);
  model.centers_ = chain.centers;
  model.equilibrium_ = equilibrium.positions;
  model.equilibrium_energy_ = total_potential(chain, equilibrium.positions);
  model.length_scale_ = chain.lattice;
  model.finish_setup();
  return model;
}

LangevinModel LangevinModel::linear(const LinearizedSystem& sys)
{
  LangevinModel model;
  model.system_ = sys;
  model.system_.validate();
  model.nonlinear_ = false;
  model.length_scale_ = 1.0;
  model.finish_setup();
  return model;
}

void LangevinModel::finish_setup()
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system_.stiffness, Eigen::EigenvaluesOnly);
  const double k_max = eig.eigenvalues().maxCoeff();
  if (!(k_max > 0.0)) {
    throw ConfigError("stiffness matrix has no positive eigenvalue");
  }
  omega_max_ = std::sqrt(k_max / system_.mass);

  const DriftNoise dn = build_drift_and_noise(system_);
  Eigen::EigenSolver<Eigen::MatrixXd> drift_eig(dn.drift, false);
  const double slowest = -drift_eig.eigenvalues().real().maxCoeff();
  relaxation_time_ = slowest > 0.0 ? 1.0 / slowest : std::numeric_limits<double>::infinity();
}

void LangevinModel::force(const Eigen::VectorXd& y, Eigen::VectorXd& out) const
{
  const int n = size();
  if (!nonlinear_) {
    out.noalias() = -system_.stiffness * y;
    return;
  }
  out.resize(n);
  const double* eq = equilibrium_.data();
  const double* yy = y.data();
  double* f = out.data();
  for (int i = 0; i < n; ++i) {
    f[i] = -omega_sq_[i] * (eq[i] + yy[i] - centers_[i]);
  }
  for (int i = 0; i < n; ++i) {
    const double xi = eq[i] + yy[i];
    double fi = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = eq[j] + yy[j] - xi;
      if (!(d > 0.0)) {
        throw SingularityError("ions crossed during integration");
      }
      const double c = 1.0 / (d * d);
      fi -= c;
      f[j] += c;
    }
    f[i] += fi;
  }
}

double LangevinModel::potential_energy(const Eigen::VectorXd& y) const
{
  if (!nonlinear_) {
    return 0.5 * y.dot(system_.stiffness * y);
  }
  const int n = size();
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = equilibrium_[i] + y[i] - centers_[i];
    v += 0.5 * omega_sq_[i] * dx * dx;
    for (int j = i + 1; j < n; ++j) {
      v += 1.0 / (equilibrium_[j] + y[j] - equilibrium_[i] - y[i]);
    }
  }
  return v - equilibrium_energy_;
}

IntegratorConfig LangevinModel::default_integrator(const IntegratorFactors& factors,
                                                   Scheme scheme) const
{
  if (!std::isfinite(relaxation_time_)) {
    throw ConfigError("no damped mode: cannot derive a burn-in time");
  }
  if (!(factors.dt_factor > 0.0) || !(factors.burn_in_factor >= 0.0)
      || !(factors.t_end_factor > factors.burn_in_factor)) {
    throw ConfigError("integrator factors need dt_factor > 0 and t_end_factor > burn_in_factor >= 0");
  }
  IntegratorConfig integ;
  integ.scheme = scheme;
  integ.dt = factors.dt_factor / omega_max_;
  integ.burn_in = factors.burn_in_factor * relaxation_time_;
  integ.t_end = factors.t_end_factor * relaxation_time_;
  return integ;
}

Eigen::MatrixXd TrajectoryStats::second_moments() const
{
  if (samples == 0) {
    return Eigen::MatrixXd::Zero(mean.size(), mean.size());
  }
  return comoment / static_cast<double>(samples) + mean * mean.transpose();
}

TrajectoryStats simulate_trajectory(const LangevinModel& model, const IntegratorConfig& integ,
                                    std::uint64_t seed, const std::optional<InitialState>& initial)
{
  integ.validate(model.omega_max());
  const LinearizedSystem& sys = model.system();
  const int n = model.size();
  const double m = sys.mass;
  const double dt = integ.dt;
  const bool leapfrog = integ.scheme == Scheme::stochastic_leapfrog;
  // The leapfrog scheme applies the bath twice per step, over dt/2 each.
  const double h = leapfrog ? 0.5 * dt : dt;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  if (initial) {
    if (initial->y.size() != n || initial->p.size() != n) {
      throw ConfigError("initial state has the wrong dimension");
    }
    y = initial->y;
    p = initial->p;
  }

  struct BathedSite
  {
    int index;
    int side;      // -1 left, +1 right, 0 neither
    double decay;  // leapfrog: exp(-gamma h / m); Euler: 1 / (1 + gamma dt / m)
    double kick;   // standard deviation of the noise increment
  };
  std::vector<int> side(n, 0);
  for (int s : sys.left_sites) side[s] = -1;
  for (int s : sys.right_sites) side[s] = 1;
  std::vector<BathedSite> bathed;
  for (int i = 0; i < n; ++i) {
    const double g = sys.gamma[i];
    const double d = sys.diffusion[i];
    if (g == 0.0 && d == 0.0) {
      continue;
    }
    BathedSite b{i, side[i], 1.0, 0.0};
    if (leapfrog) {
      b.decay = std::exp(-g * h / m);
      b.kick = g > 0.0 ? std::sqrt(m * d / g * (1.0 - b.decay * b.decay)) : std::sqrt(2.0 * d * h);
    } else {
      b.decay = 1.0 / (1.0 + g * dt / m);
      b.kick = std::sqrt(2.0 * d * dt);
    }
    bathed.push_back(b);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double substep_norm = 1.0 / std::sqrt(static_cast<double>(integ.noise_substeps));
  std::vector<double> z(bathed.size());
  auto draw = [&] {
    std::fill(z.begin(), z.end(), 0.0);
    for (int k = 0; k < integ.noise_substeps; ++k) {
      for (double& v : z) {
        v += normal(rng);
      }
    }
    for (double& v : z) {
      v *= substep_norm;
    }
  };

  const long long steps = std::llround(integ.t_end / dt);
  const long long burn = std::llround(integ.burn_in / dt);
  const long long bins = (steps + integ.series_stride - 1) / integ.series_stride;

  TrajectoryStats stats;
  stats.mean = Eigen::VectorXd::Zero(2 * n);
  stats.comoment = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  stats.site_power = Eigen::VectorXd::Zero(n);
  stats.bin_time = integ.series_stride * dt;
  stats.series_left.assign(static_cast<std::size_t>(bins), 0.0);
  stats.series_right.assign(static_cast<std::size_t>(bins), 0.0);
  if (integ.record_energy) {
    stats.energy.reserve(static_cast<std::size_t>(bins));
  }

  Eigen::VectorXd f(n);
  Eigen::VectorXd state(2 * n);
  Eigen::VectorXd delta(2 * n);

  auto fail = [&](double t, const std::string& what) {
    std::ostringstream msg;
    msg << "Langevin integration unstable at t = " << t << ": " << what << " (dt = " << dt
        << ", omega_max = " << model.omega_max() << ")";
    throw SolverError(msg.str());
  };
  auto compute_force = [&](long long step) {
    try {
      model.force(y, f);
    } catch (const SingularityError&) {
      fail(static_cast<double>(step) * dt, "ions crossed");
    }
  };

  compute_force(0);
  for (long long s = 0; s < steps; ++s) {
    const bool collect = s >= burn;
    const std::size_t bin = static_cast<std::size_t>(s / integ.series_stride);
    auto bath = [&] {
      draw();
      for (std::size_t b = 0; b < bathed.size(); ++b) {
        const BathedSite& site = bathed[b];
        const double before = p[site.index];
        const double after = leapfrog ? site.decay * before + site.kick * z[b]
                                      : site.decay * (before + site.kick * z[b]);
        p[site.index] = after;
        const double work = (after * after - before * before) / (2.0 * m);
        if (site.side < 0) {
          stats.series_left[bin] += work;
        } else if (site.side > 0) {
          stats.series_right[bin] += work;
        }
        if (collect) {
          stats.site_power[site.index] += work;
        }
      }
    };

    if (leapfrog) {
      bath();
      p += h * f;
      y += (dt / m) * p;
      compute_force(s + 1);
      p += h * f;
      bath();
    } else {
      p += dt * f;
      bath();
      y += (dt / m) * p;
      compute_force(s + 1);
    }

    const long long done = s + 1;
    if (done % integ.sample_stride == 0) {
      for (int i = 0; i < n; ++i) {
        if (!std::isfinite(y[i]) || std::abs(y[i]) > 1e3 * model.length_scale()) {
          fail(static_cast<double>(done) * dt, "displacement exceeded 1e3 lattice constants");
        }
      }
    }
    if (done > burn && (done - burn) % integ.sample_stride == 0) {
      state << y, p;
      ++stats.samples;
      delta = state - stats.mean;
      stats.mean += delta / static_cast<double>(stats.samples);
      stats.comoment.noalias() += delta * (state - stats.mean).transpose();
    }
    if (integ.record_energy && (done % integ.series_stride == 0 || done == steps)) {
      stats.energy.push_back(0.5 * p.squaredNorm() / m + model.potential_energy(y));
    }
  }

  for (long long b = 0; b < bins; ++b) {
    const long long first = b * integ.series_stride;
    const long long count = std::min<long long>(integ.series_stride, steps - first);
    const double duration = static_cast<double>(count) * dt;
    stats.series_left[b] /= duration;
    stats.series_right[b] /= duration;
  }
  const double averaging_time = static_cast<double>(steps - burn) * dt;
  if (averaging_time > 0.0) {
    stats.site_power /= averaging_time;
  }
  for (int s : sys.left_sites) stats.left_power += stats.site_power[s];
  for (int s : sys.right_sites) stats.right_power += stats.site_power[s];
  stats.final_y = y;
  stats.final_p = p;
  return stats;
}

void EnsembleSpec::validate() const
{
  if (n_trials < 1) {
    throw ConfigError("ensemble needs at least one trajectory");
  }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index)
{
  // splitmix64 finalizer applied to a counter offset from the master seed.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::size_t kTrialBlock = 64;

// Per-trajectory quantities reduced across the ensemble: upper triangle of
// <z z^T>, site powers, J_L, J_R, J_L + J_R.
Eigen::VectorXd flatten(const TrajectoryStats& stats, int n)
{
  const int dim = 2 * n;
  const Eigen::MatrixXd mom = stats.second_moments();
  Eigen::VectorXd v(dim * (dim + 1) / 2 + n + 3);
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      v[k++] = mom(i, j);
    }
  }
  for (int i = 0; i < n; ++i) {
    v[k++] = stats.site_power[i];
  }
  v[k++] = stats.left_power;
  v[k++] = stats.right_power;
  v[k++] = stats.left_power + stats.right_power;
  return v;
}

}  // namespace

EnsembleResult run_ensemble(const LangevinModel& model, const IntegratorConfig& integ,
                            const EnsembleSpec& ensemble, int threads)
{
  ensemble.validate();
  integ.validate(model.omega_max());
  const int n = model.size();
  const auto trials = static_cast<std::size_t>(ensemble.n_trials);

  Eigen::VectorXd mean;
  Eigen::VectorXd m2;
  std::vector<double> sum_left;
  std::vector<double> sum_right;
  double bin_time = 0.0;
  long count = 0;

  std::vector<TrajectoryStats> block;
  for (std::size_t start = 0; start < trials; start += kTrialBlock) {
    const std::size_t size = std::min(kTrialBlock, trials - start);
    block.assign(size, TrajectoryStats{});
    parallel_for(
        size,
        [&](std::size_t i) {
          block[i] = simulate_trajectory(model, integ, trial_seed(ensemble.master_seed, start + i));
        },
        threads);
    // Reduction in trial order keeps results independent of scheduling.
    for (const TrajectoryStats& stats : block) {
      const Eigen::VectorXd v = flatten(stats, n);
      ++count;
      if (count == 1) {
        mean = v;
        m2 = Eigen::VectorXd::Zero(v.size());
        sum_left = stats.series_left;
        sum_right = stats.series_right;
        bin_time = stats.bin_time;
        continue;
      }
      const Eigen::VectorXd d = v - mean;
      mean += d / static_cast<double>(count);
      m2 += d.cwiseProduct(v - mean);
      for (std::size_t b = 0; b < sum_left.size(); ++b) {
        sum_left[b] += stats.series_left[b];
        sum_right[b] += stats.series_right[b];
      }
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd se(mean.size());
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    se[k] = count > 1 ? std::sqrt(m2[k] / static_cast<double>(count - 1) / static_cast<double>(count))
                      : nan;
  }

  EnsembleResult out;
  EnsembleEstimate& est = out.estimate;
  est.trials = static_cast<int>(count);
  const int dim = 2 * n;
  est.moments.resize(dim, dim);
  est.moments_se.resize(dim, dim);
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j, ++k) {
      est.moments(i, j) = est.moments(j, i) = mean[k];
      est.moments_se(i, j) = est.moments_se(j, i) = se[k];
    }
  }
  const double mass = model.system().mass;
  est.temperatures = est.moments.diagonal().tail(n) / mass;
  est.temperatures_se = est.moments_se.diagonal().tail(n) / mass;
  est.site_currents = mean.segment(k, n);
  est.site_currents_se = se.segment(k, n);
  k += n;
  est.J_L = mean[k];
  est.J_L_se = se[k];
  est.J_R = mean[k + 1];
  est.J_R_se = se[k + 1];
  est.J_sum = mean[k + 2];
  est.J_sum_se = se[k + 2];

  CurrentSeries& series = out.series;
  for (std::size_t b = 0; b < sum_left.size(); ++b) {
    const double left = sum_left[b] / static_cast<double>(count);
    const double right = sum_right[b] / static_cast<double>(count);
    series.time.push_back((static_cast<double>(b) + 0.5) * bin_time);
    series.left.push_back(left);
    series.right.push_back(right);
    series.total.push_back(left + right);
  }
  return out;
}

EnsembleEstimate ensemble_moments(const LangevinModel& model, const IntegratorConfig& integ,
                                  const EnsembleSpec& ensemble, int threads)
{
  return run_ensemble(model, integ, ensemble, threads).estimate;
}

CurrentSeries current_time_series(const LangevinModel& model, const IntegratorConfig& integ,
                                  const EnsembleSpec& ensemble, int window_bins, int threads)
{
  return sliding_average(run_ensemble(model, integ, ensemble, threads).series, window_bins);
}

CurrentSeries sliding_average(const CurrentSeries& series, int window_bins)
{
  if (window_bins <= 1) {
    return series;
  }
  const auto n = static_cast<long>(series.time.size());
  const long before = (window_bins - 1) / 2;
  const long after = window_bins - 1 - before;
  CurrentSeries out;
  out.time = series.time;
  auto smooth = [&](const std::vector<double>& in) {
    std::vector<double> res(in.size());
    for (long i = 0; i < n; ++i) {
      const long lo = std::max(0L, i - before);
      const long hi = std::min(n - 1, i + after);
      double sum = 0.0;
      for (long j = lo; j <= hi; ++j) {
        sum += in[j];
      }
      res[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return res;
  };
  out.left = smooth(series.left);
  out.right = smooth(series.right);
  out.total = smooth(series.total);
  return out;
}

LangevinModel make_langevin_model(const PreparedScenario& prepared, bool linearized)
{
  if (linearized) {
    return LangevinModel::linear(prepared.system);
  }
  return LangevinModel::nonlinear(prepared.chain, prepared.equilibrium, prepared.system);
}

LangevinReport langevin_report(const PreparedScenario& prepared, const LangevinSettings& settings,
                               const EnsembleSpec& ensemble, int threads)
{
  const LangevinModel model = make_langevin_model(prepared, settings.linearized);
  IntegratorConfig integ = model.default_integrator(settings.factors, settings.scheme);
  integ.sample_stride = settings.sample_stride;
  integ.series_stride = settings.series_stride;

  LangevinReport report;
  report.integrator = integ;
  report.result = run_ensemble(model, integ, ensemble, threads);
  report.units = prepared.chain.units;
  report.omega_ratio = prepared.chain.omega;
  report.warnings = prepared.warnings;

  const Units& u = report.units;
  const double mk = u.temperature() * 1e3;
  const double watts = u.power();
  const EnsembleEstimate& est = report.result.estimate;
  report.temperatures_mK = est.temperatures * mk;
  report.temperatures_se_mK = est.temperatures_se * mk;
  report.site_currents_W = est.site_currents * watts;
  report.site_currents_se_W = est.site_currents_se * watts;
  report.J_L_W = est.J_L * watts;
  report.J_L_se_W = est.J_L_se * watts;
  report.J_R_W = est.J_R * watts;
  report.J_R_se_W = est.J_R_se * watts;

  const CurrentSeries smoothed = sliding_average(report.result.series, settings.window_bins);
  for (std::size_t b = 0; b < smoothed.time.size(); ++b) {
    report.series_W.time.push_back(smoothed.time[b] * u.time * 1e6);
    report.series_W.left.push_back(smoothed.left[b] * watts);
    report.series_W.right.push_back(smoothed.right[b] * watts);
    report.series_W.total.push_back(smoothed.total[b] * watts);
  }
  return report;
}

}  // namespace ionflux
