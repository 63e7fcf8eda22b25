#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "ionflux/config.hpp"
#include "ionflux/errors.hpp"
#include "ionflux/experiments.hpp"
#include "ionflux/presets.hpp"
#include "ionflux/report_io.hpp"
#include "ionflux/validation.hpp"

namespace py = pybind11;
using namespace ionflux;

namespace {

Bias parse_bias(const std::string& bias)
{
  if (bias == "forward") return Bias::forward;
  if (bias == "reverse") return Bias::reverse;
  throw ConfigError("bias must be forward or reverse");
}

py::dict steady(const std::string& config, const std::string& bias, const std::string& backend)
{
  RunConfig cfg = parse_config(config);
  if (backend == "lyapunov") {
    cfg.solver.backend = Backend::lyapunov;
  } else if (backend != "moments") {
    throw ConfigError("backend must be moments or lyapunov");
  }
  const PreparedScenario prepared = prepare_scenario(cfg.scenario, parse_bias(bias), cfg.equilibrium);
  const SteadyStateReport r = steady_state_report(prepared, cfg.solver.backend, cfg.solver.tolerances);
  py::dict out;
  out["omega_ratio"] = r.omega_ratio;
  out["positions_um"] = r.positions_um;
  out["T_mK"] = r.temperatures_mK;
  out["j_W"] = r.site_currents_W;
  out["J_L_W"] = r.J_L_W;
  out["J_R_W"] = r.J_R_W;
  out["energy_balance"] = r.state.energy_balance;
  out["moment_residual"] = r.state.moment_residual;
  out["warnings"] = r.warnings;
  return out;
}

py::dict langevin(const std::string& config, int trials, std::uint64_t seed, int threads)
{
  RunConfig cfg = parse_config(config);
  cfg.solver.ensemble = {trials, seed};
  const PreparedScenario prepared = prepare_scenario(cfg.scenario, Bias::forward, cfg.equilibrium);
  const LangevinReport r = langevin_report(prepared, cfg.solver.langevin, cfg.solver.ensemble,
                                           threads > 0 ? threads : worker_count());
  py::dict out;
  out["trials"] = r.result.estimate.trials;
  out["T_mK"] = r.temperatures_mK;
  out["T_se_mK"] = r.temperatures_se_mK;
  out["J_L_W"] = r.J_L_W;
  out["J_L_se_W"] = r.J_L_se_W;
  out["J_R_W"] = r.J_R_W;
  out["J_R_se_W"] = r.J_R_se_W;
  out["time_us"] = r.series_W.time;
  out["series_L_W"] = r.series_W.left;
  out["series_R_W"] = r.series_W.right;
  return out;
}

py::dict bias_pair(const std::string& config)
{
  const RunConfig cfg = parse_config(config);
  const BiasPair p = run_bias_pair(cfg.scenario, cfg.solver);
  py::dict out;
  out["J_forward_W"] = p.forward;
  out["J_backward_W"] = p.backward;
  out["R"] = p.rectification;
  out["warnings"] = p.warnings;
  return out;
}

py::list rows(const SweepResult& result)
{
  py::list out;
  for (const SweepRow& row : result.rows) {
    py::dict d;
    for (std::size_t a = 0; a < result.axis_names.size(); ++a) {
      d[py::str(result.axis_names[a])] = row.parameters[a];
    }
    d["J_forward_W"] = row.J_forward;
    d["J_backward_W"] = row.J_backward;
    d["R"] = row.R;
    d["status"] = row.status;
    out.append(d);
  }
  return out;
}

py::dict sweep(const std::string& config)
{
  const RunConfig cfg = parse_config(config);
  if (!cfg.sweep) {
    throw ConfigError("config has no sweep section");
  }
  SolverOptions solver = cfg.solver;
  solver.kind = cfg.sweep->solver;
  py::dict out;
  if (cfg.sweep->kind == SweepKind::compare) {
    const ProfileComparison cmp = compare_profiles(cfg.scenario, cfg.sweep->axis1.grid(), solver);
    out["graded"] = rows(cmp.graded);
    out["segmented"] = rows(cmp.segmented);
    return out;
  }
  SweepSpec spec;
  spec.base = cfg.scenario;
  spec.axis1 = cfg.sweep->axis1.axis();
  if (cfg.sweep->axis2) {
    spec.axis2 = cfg.sweep->axis2->axis();
  }
  spec.solver = solver;
  const SweepResult result = run_sweep(spec);
  out["axes"] = result.axis_names;
  out["rows"] = rows(result);
  if (result.axis_names.size() == 1) {
    out["zero_crossings"] = find_zero_crossings(result);
  }
  return out;
}

py::list validate(std::uint64_t seed)
{
  ValidationOptions options;
  options.seed = seed;
  py::list out;
  for (const CheckResult& r : run_property_suite(options)) {
    py::dict d;
    d["name"] = r.name;
    d["passed"] = r.passed;
    d["value"] = r.value;
    d["tolerance"] = r.tolerance;
    d["detail"] = r.detail;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Heat transport and rectification in trapped-ion chains";
  m.attr("__version__") = version_string();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def(
      "characteristic_length",
      [](double omega1_hz) { return characteristic_length(magnesium24(), 2.0 * std::numbers::pi * omega1_hz); },
      py::arg("omega1_hz"), "l in metres for 24Mg+ at trap frequency omega1 / 2 pi.");
  m.def(
      "bath_temperature",
      [](double detuning_over_linewidth) {
        const IonSpecies mg = magnesium24();
        return bath_temperature(detuning_over_linewidth * mg.linewidth, mg);
      },
      py::arg("detuning_over_linewidth"), "Molasses temperature in kelvin for 24Mg+.");
  m.def("preset_names", &preset_names);
  m.def("preset_text", [](const std::string& name) { return std::string(preset_text(name)); }, py::arg("name"));
  m.def("normalize", [](const std::string& config) { return dump_config(parse_config(config)); },
        py::arg("config"), "Canonical YAML with defaults filled in.");
  m.def("config_hash", [](const std::string& config) { return config_hash(parse_config(config)); },
        py::arg("config"));

  m.def("steady_state", &steady, py::arg("config"), py::arg("bias") = "forward",
        py::arg("backend") = "moments", "Algebraic steady state of the config's chain.");
  m.def("langevin", &langevin, py::arg("config"), py::arg("trials") = 100, py::arg("seed") = 1,
        py::arg("threads") = 0, "Langevin ensemble estimate of the config's chain.");
  m.def("bias_pair", &bias_pair, py::arg("config"), "Forward and backward currents and R.");
  m.def("sweep", &sweep, py::arg("config"), "Runs the config's sweep section.");
  m.def("validate", &validate, py::arg("seed") = 20240601, "Property and oracle suite.");
  m.def("rectification_factor", &rectification_factor, py::arg("forward"), py::arg("backward"));
}
