#include "ionflux/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ionflux/errors.hpp"
#include "ionflux/parallel.hpp"

namespace ionflux {

namespace {

constexpr std::pair<SweepParameter, std::string_view> kParameterNames[] = {
    {SweepParameter::delta_omega_ratio, "delta_omega_ratio"},
    {SweepParameter::lattice_ratio, "lattice_ratio"},
    {SweepParameter::omega1, "omega1"},
    {SweepParameter::sites, "N"},
    {SweepParameter::profile, "profile"},
};

}  // namespace

std::string_view parameter_name(SweepParameter parameter)
{
  for (const auto& [p, name] : kParameterNames) {
    if (p == parameter) {
      return name;
    }
  }
  return "unknown";
}

SweepParameter parse_parameter(std::string_view name)
{
  for (const auto& [p, known] : kParameterNames) {
    if (known == name) {
      return p;
    }
  }
  throw ConfigError("unknown sweep parameter '" + std::string(name)
                    + "' (expected delta_omega_ratio, lattice_ratio, omega1, N or profile)");
}

void SweepAxis::validate() const
{
  const std::string name(parameter_name(parameter));
  if (values.empty()) {
    throw ConfigError("sweep axis " + name + " has an empty grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ConfigError("sweep axis " + name + " contains a non-finite value");
    }
  }
  if (values.size() > 1) {
    const bool rising = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (rising ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
        throw ConfigError("sweep axis " + name + " is not strictly monotone");
      }
    }
  }
  for (double v : values) {
    switch (parameter) {
      case SweepParameter::delta_omega_ratio:
        break;
      case SweepParameter::lattice_ratio:
      case SweepParameter::omega1:
        if (!(v > 0.0)) {
          throw ConfigError("sweep axis " + name + " needs positive values");
        }
        break;
      case SweepParameter::sites:
        if (v < 1.0 || v != std::floor(v)) {
          throw ConfigError("sweep axis N needs positive integers");
        }
        break;
      case SweepParameter::profile:
        if (v != 0.0 && v != 1.0) {
          throw ConfigError("sweep axis profile takes 0 (graded) or 1 (segmented)");
        }
        break;
    }
  }
}

std::vector<double> linear_grid(double first, double last, int points)
{
  if (points < 1) {
    throw ConfigError("grid needs at least one point");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[i] = points == 1 ? first : first + (last - first) * i / (points - 1);
  }
  if (points > 1) {
    grid.back() = last;
  }
  return grid;
}

ScenarioSpec apply_parameter(ScenarioSpec base, SweepParameter parameter, double value)
{
  switch (parameter) {
    case SweepParameter::delta_omega_ratio:
      base.delta_omega_ratio = value;
      break;
    case SweepParameter::lattice_ratio:
      base.lattice = LatticeSpec::in_lengths(value);
      break;
    case SweepParameter::omega1:
      base.omega1 = 2.0 * std::numbers::pi * value;
      break;
    case SweepParameter::sites:
      base.sites = static_cast<int>(std::lround(value));
      break;
    case SweepParameter::profile:
      base.profile = value == 0.0 ? ProfileKind::graded : ProfileKind::segmented;
      break;
  }
  return base;
}

namespace {

struct BiasSolve
{
  double current = 0.0;  // hot-bath current, W
  double energy_balance = 0.0;
  std::vector<std::string> warnings;
};

template <class Error>
[[noreturn]] void rethrow_annotated(const Error& e, Bias bias)
{
  throw Error(std::string(bias == Bias::forward ? "forward bias: " : "reverse bias: ") + e.what());
}

BiasSolve solve_bias(const ScenarioSpec& spec, Bias bias, const SolverOptions& solver)
{
  try {
    const PreparedScenario prepared = prepare_scenario(spec, bias);
    BiasSolve out;
    out.warnings = prepared.warnings;
    if (solver.kind == SolverKind::algebraic) {
      const SteadyStateReport report =
          steady_state_report(prepared, solver.backend, solver.tolerances);
      out.current = bias == Bias::forward ? report.J_L_W : report.J_R_W;
      out.energy_balance = report.state.energy_balance;
    } else {
      const LangevinReport report =
          langevin_report(prepared, solver.langevin, solver.ensemble, solver.threads);
      out.current = bias == Bias::forward ? report.J_L_W : report.J_R_W;
    }
    return out;
  } catch (const ConfigError& e) {
    rethrow_annotated(e, bias);
  } catch (const SingularityError& e) {
    rethrow_annotated(e, bias);
  } catch (const SolverError& e) {
    rethrow_annotated(e, bias);
  }
}

}  // namespace

BiasPair run_bias_pair(const ScenarioSpec& spec, const SolverOptions& solver)
{
  spec.validate();
  const double hot = bath_temperature(spec.hot_beam().detuning, spec.species);
  const double cold = bath_temperature(spec.cold_beam().detuning, spec.species);
  if (hot == cold) {
    throw SolverError("rectification undefined: both heat currents vanish (equal bath temperatures)");
  }
  if (hot < cold) {
    std::ostringstream msg;
    msg << "hot bath (" << hot * 1e3 << " mK) is colder than the cold bath (" << cold * 1e3
        << " mK)";
    throw ConfigError(msg.str());
  }

  const BiasSolve forward = solve_bias(spec, Bias::forward, solver);
  const BiasSolve backward = solve_bias(spec, Bias::reverse, solver);

  BiasPair pair;
  pair.forward = std::abs(forward.current);
  pair.backward = std::abs(backward.current);
  pair.rectification = rectification_factor(pair.forward, pair.backward);
  pair.energy_balance = std::max(forward.energy_balance, backward.energy_balance);
  pair.warnings = forward.warnings;
  for (const auto& w : backward.warnings) {
    if (std::find(pair.warnings.begin(), pair.warnings.end(), w) == pair.warnings.end()) {
      pair.warnings.push_back(w);
    }
  }
  return pair;
}

double SweepRow::max_flux() const
{
  return std::max(J_forward, J_backward);
}

void SweepSpec::validate() const
{
  axis1.validate();
  if (axis2) {
    axis2->validate();
    if (axis2->parameter == axis1.parameter) {
      throw ConfigError("sweep axes must vary different parameters");
    }
  }
  solver.ensemble.validate();
}

SweepResult run_sweep(const SweepSpec& spec)
{
  spec.validate();
  SweepResult result;
  result.axis_names.emplace_back(parameter_name(spec.axis1.parameter));
  if (spec.axis2) {
    result.axis_names.emplace_back(parameter_name(spec.axis2->parameter));
  }

  const std::size_t n1 = spec.axis1.values.size();
  const std::size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
  result.rows.resize(n1 * n2);
  for (std::size_t j = 0; j < n2; ++j) {
    for (std::size_t i = 0; i < n1; ++i) {
      SweepRow& row = result.rows[j * n1 + i];
      row.parameters.push_back(spec.axis1.values[i]);
      if (spec.axis2) {
        row.parameters.push_back(spec.axis2->values[j]);
      }
    }
  }

  auto evaluate = [&](std::size_t k) {
    SweepRow& row = result.rows[k];
    try {
      ScenarioSpec point = apply_parameter(spec.base, spec.axis1.parameter, row.parameters[0]);
      if (spec.axis2) {
        point = apply_parameter(point, spec.axis2->parameter, row.parameters[1]);
      }
      const BiasPair pair = run_bias_pair(point, spec.solver);
      row.J_forward = pair.forward;
      row.J_backward = pair.backward;
      row.R = pair.rectification;
      row.energy_balance = pair.energy_balance;
      row.warnings = pair.warnings;
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.J_forward = row.J_backward = row.R = nan;
      row.status = std::string("error: ") + e.what();
    }
  };

  if (spec.solver.kind == SolverKind::algebraic) {
    parallel_for(result.rows.size(), evaluate, spec.solver.threads);
  } else {
    // Trajectories already run in parallel inside each point.
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
      evaluate(k);
    }
  }
  return result;
}

SweepResult sweep_gradient(const SweepSpec& spec)
{
  if (spec.axis1.parameter != SweepParameter::delta_omega_ratio || spec.axis2) {
    throw ConfigError("gradient sweep takes a single delta_omega_ratio axis");
  }
  return run_sweep(spec);
}

SweepResult sweep_map(const SweepSpec& spec)
{
  if (spec.axis1.parameter != SweepParameter::delta_omega_ratio || !spec.axis2
      || spec.axis2->parameter != SweepParameter::lattice_ratio) {
    throw ConfigError("rectification map takes delta_omega_ratio and lattice_ratio axes");
  }
  return run_sweep(spec);
}

std::vector<double> find_zero_crossings(const SweepResult& result)
{
  if (result.axis_names.size() != 1) {
    throw ConfigError("zero crossings need a single-axis sweep");
  }
  const bool gradient_axis = result.axis_names[0] == parameter_name(SweepParameter::delta_omega_ratio);
  std::vector<std::pair<double, double>> points;
  for (const SweepRow& row : result.rows) {
    if (!row.ok() || !std::isfinite(row.R)) {
      continue;
    }
    if (gradient_axis && row.parameters[0] == 0.0) {
      continue;
    }
    points.emplace_back(row.parameters[0], row.R);
  }

  std::vector<double> crossings;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto [xa, ra] = points[k - 1];
    const auto [xb, rb] = points[k];
    if (ra * rb < 0.0) {
      crossings.push_back(xa + (xb - xa) * ra / (ra - rb));
    } else if (rb == 0.0 && ra != 0.0 && k + 1 < points.size() && points[k + 1].second * ra < 0.0) {
      crossings.push_back(xb);
    }
  }
  return crossings;
}

ProfileComparison compare_profiles(const ScenarioSpec& base, const std::vector<double>& gradients,
                                   const SolverOptions& solver)
{
  if (base.profile == ProfileKind::explicit_list) {
    throw ConfigError("profile comparison needs a graded or segmented base chain");
  }
  SweepSpec spec;
  spec.base = base;
  spec.axis1 = {SweepParameter::delta_omega_ratio, gradients};
  spec.solver = solver;

  ProfileComparison out;
  spec.base.profile = ProfileKind::graded;
  out.graded = run_sweep(spec);
  spec.base.profile = ProfileKind::segmented;
  out.segmented = run_sweep(spec);
  return out;
}

}  // namespace ionflux
