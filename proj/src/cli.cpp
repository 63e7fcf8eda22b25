#include "ionflux/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ionflux/config.hpp"
#include "ionflux/errors.hpp"
#include "ionflux/presets.hpp"
#include "ionflux/report_io.hpp"
#include "ionflux/validation.hpp"

namespace ionflux {

namespace {

struct Options
{
  std::string config_path;
  std::string format;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string backend;
  std::string preset;
  bool list = false;
};

RunConfig read_config(const Options& opts, std::istream& in)
{
  RunConfig cfg;
  if (opts.config_path == "-") {
    std::ostringstream text;
    text << in.rdbuf();
    cfg = parse_config(text.str());
  } else {
    cfg = load_config(opts.config_path);
  }
  if (opts.seed) {
    cfg.solver.ensemble.master_seed = *opts.seed;
  }
  if (opts.trials) {
    if (*opts.trials < 1) {
      throw ConfigError("--trials must be at least 1");
    }
    cfg.solver.ensemble.n_trials = *opts.trials;
  }
  if (!opts.backend.empty()) {
    if (opts.backend == "moments") {
      cfg.solver.backend = Backend::moments;
    } else if (opts.backend == "lyapunov") {
      cfg.solver.backend = Backend::lyapunov;
    } else {
      throw ConfigError("--backend must be moments or lyapunov");
    }
  }
  if (!opts.format.empty()) {
    cfg.output.formats = {opts.format};
  }
  if (!opts.out_dir.empty()) {
    cfg.output.directory = opts.out_dir;
  }
  return cfg;
}

/// Writes the table and JSON either to files under output.directory or to `out`.
class Sink
{
public:
  Sink(const RunConfig& cfg, const std::string& command, std::ostream& out, std::ostream& err)
      : cfg_(cfg), stem_(cfg.output.stem.empty() ? command : cfg.output.stem), out_(out), err_(err)
  {
  }

  bool wants(const std::string& format) const
  {
    const auto& f = cfg_.output.formats;
    return std::find(f.begin(), f.end(), format) != f.end();
  }

  template <class Writer>
  void table(const std::string& suffix, Writer&& write)
  {
    if (!wants("csv")) {
      return;
    }
    if (cfg_.output.directory.empty()) {
      if (suffix.empty()) {
        write(out_);
      }
      return;
    }
    std::ofstream file = open(stem_ + suffix + ".csv");
    write(file);
  }

  void json(const nlohmann::json& doc)
  {
    if (!wants("json")) {
      return;
    }
    if (cfg_.output.directory.empty()) {
      if (!wants("csv")) {
        out_ << doc.dump(2) << "\n";
      }
      return;
    }
    std::ofstream file = open(stem_ + ".json");
    file << doc.dump(2) << "\n";
  }

private:
  std::ofstream open(const std::string& name)
  {
    const std::filesystem::path dir(cfg_.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::filesystem::path path = dir / name;
    std::ofstream file(path);
    if (!file) {
      throw ConfigError("cannot write output file '" + path.string() + "'");
    }
    err_ << "wrote " << path.string() << "\n";
    return file;
  }

  const RunConfig& cfg_;
  std::string stem_;
  std::ostream& out_;
  std::ostream& err_;
};

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err)
{
  for (const auto& w : warnings) {
    err << "warning: " << w << "\n";
  }
}

int run_steady(const Options& opts, std::istream& in, std::ostream& out, std::ostream& err)
{
  const RunConfig cfg = read_config(opts, in);
  const PreparedScenario prepared = prepare_scenario(cfg.scenario, Bias::forward, cfg.equilibrium);
  print_warnings(prepared.warnings, err);
  const SteadyStateReport report =
      steady_state_report(prepared, cfg.solver.backend, cfg.solver.tolerances);
  Sink sink(cfg, "steady", out, err);
  sink.table("", [&](std::ostream& os) { write_steady_csv(os, report); });
  sink.json(steady_json(report, make_provenance("steady", cfg, std::string(backend_name(cfg.solver.backend)))));
  return kExitOk;
}

int run_langevin(const Options& opts, std::istream& in, std::ostream& out, std::ostream& err)
{
  const RunConfig cfg = read_config(opts, in);
  const PreparedScenario prepared = prepare_scenario(cfg.scenario, Bias::forward, cfg.equilibrium);
  print_warnings(prepared.warnings, err);
  const LangevinReport report =
      langevin_report(prepared, cfg.solver.langevin, cfg.solver.ensemble, cfg.solver.threads);
  Sink sink(cfg, "langevin", out, err);
  sink.table("", [&](std::ostream& os) { write_langevin_csv(os, report); });
  sink.table("_series", [&](std::ostream& os) { write_series_csv(os, report.series_W); });
  sink.json(langevin_json(report, make_provenance("langevin", cfg, "langevin")));
  return kExitOk;
}

SolverOptions sweep_solver(const RunConfig& cfg)
{
  SolverOptions solver = cfg.solver;
  solver.kind = cfg.sweep->solver;
  return solver;
}

int run_compare_with(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  const SolverOptions solver = sweep_solver(cfg);
  const ProfileComparison cmp = compare_profiles(cfg.scenario, cfg.sweep->axis1.grid(), solver);
  Sink sink(cfg, "compare", out, err);
  sink.table("", [&](std::ostream& os) { write_compare_csv(os, cmp); });
  sink.json(compare_json(cmp, make_provenance("compare", cfg, std::string(solver_kind_name(solver.kind)))));
  return kExitOk;
}

int run_sweep_cmd(const Options& opts, std::istream& in, std::ostream& out, std::ostream& err)
{
  const RunConfig cfg = read_config(opts, in);
  if (!cfg.sweep) {
    throw ConfigError("config has no sweep section");
  }
  if (cfg.sweep->kind == SweepKind::compare) {
    return run_compare_with(cfg, out, err);
  }
  SweepSpec spec;
  spec.base = cfg.scenario;
  spec.axis1 = cfg.sweep->axis1.axis();
  if (cfg.sweep->axis2) {
    spec.axis2 = cfg.sweep->axis2->axis();
  }
  spec.solver = sweep_solver(cfg);
  const SweepResult result = cfg.sweep->kind == SweepKind::map ? sweep_map(spec) : sweep_gradient(spec);
  std::size_t failed = 0;
  for (const auto& row : result.rows) {
    failed += row.ok() ? 0 : 1;
  }
  if (failed > 0) {
    err << "warning: " << failed << " of " << result.rows.size() << " grid points failed\n";
  }
  Sink sink(cfg, "sweep", out, err);
  sink.table("", [&](std::ostream& os) { write_sweep_csv(os, result); });
  sink.json(sweep_json(result, make_provenance("sweep", cfg, std::string(solver_kind_name(spec.solver.kind)))));
  return kExitOk;
}

int run_compare(const Options& opts, std::istream& in, std::ostream& out, std::ostream& err)
{
  RunConfig cfg = read_config(opts, in);
  if (!cfg.sweep) {
    throw ConfigError("compare needs a sweep section with a delta_omega_ratio axis");
  }
  if (cfg.sweep->axis1.parameter != "delta_omega_ratio" || cfg.sweep->axis2) {
    throw ConfigError("compare takes a single delta_omega_ratio axis");
  }
  return run_compare_with(cfg, out, err);
}

int run_validate(const Options& opts, std::ostream& out)
{
  ValidationOptions vo;
  if (opts.seed) {
    vo.seed = *opts.seed;
  }
  const auto results = run_property_suite(vo);
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "validation failed") << "\n";
  return all ? kExitOk : kExitValidation;
}

int run_preset(const Options& opts, std::ostream& out)
{
  if (opts.list || opts.preset.empty()) {
    for (const auto& name : preset_names()) {
      out << name << "\n";
    }
    return kExitOk;
  }
  out << preset_text(opts.preset);
  return kExitOk;
}

int run_normalize(const Options& opts, std::istream& in, std::ostream& out)
{
  out << dump_config(read_config(opts, in));
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                 std::ostream& err)
{
  CLI::App app{"Heat transport and rectification in trapped-ion chains", "ionflux"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opts.config_path, "config file, or - for stdin")->required();
    sub->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", opts.out_dir, "write files to this directory");
  };

  CLI::App* steady = app.add_subcommand("steady", "algebraic steady state of one chain");
  add_common(steady);
  steady->add_option("--backend", opts.backend, "moments or lyapunov");

  CLI::App* langevin = app.add_subcommand("langevin", "stochastic ensemble of one chain");
  add_common(langevin);
  langevin->add_option("--seed", opts.seed, "override the master seed");
  langevin->add_option("--trials", opts.trials, "override the number of trajectories");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep from the config's sweep section");
  add_common(sweep);
  sweep->add_option("--seed", opts.seed, "override the master seed");
  sweep->add_option("--trials", opts.trials, "override the number of trajectories");

  CLI::App* compare = app.add_subcommand("compare", "graded versus segmented profiles");
  add_common(compare);
  compare->add_option("--seed", opts.seed, "override the master seed");
  compare->add_option("--trials", opts.trials, "override the number of trajectories");

  CLI::App* validate = app.add_subcommand("validate", "run the property and oracle suite");
  validate->add_option("--seed", opts.seed, "seed for randomized checks");

  CLI::App* preset = app.add_subcommand("preset", "print a shipped figure config");
  preset->add_option("name", opts.preset, "preset name");
  preset->add_flag("--list", opts.list, "list preset names");

  CLI::App* normalize = app.add_subcommand("normalize", "print a config with defaults filled in");
  normalize->add_option("config", opts.config_path, "config file, or - for stdin")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (steady->parsed()) return run_steady(opts, in, out, err);
    if (langevin->parsed()) return run_langevin(opts, in, out, err);
    if (sweep->parsed()) return run_sweep_cmd(opts, in, out, err);
    if (compare->parsed()) return run_compare(opts, in, out, err);
    if (validate->parsed()) return run_validate(opts, out);
    if (preset->parsed()) return run_preset(opts, out);
    if (normalize->parsed()) return run_normalize(opts, in, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace ionflux
