#include "ionflux/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ionflux/errors.hpp"

namespace ionflux {

namespace {

std::string line_of(const YAML::Node& node)
{
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) {
    return "";
  }
  return " (line " + std::to_string(mark.line + 1) + ")";
}

/// Mapping node that tracks which keys were read so the rest can be rejected.
class Section
{
public:
  Section(const YAML::Node& node, std::string path)
      : node_(node), path_(std::move(path))
  {
    if (!node_.IsMap()) {
      throw ConfigError(path_ + ": expected a mapping" + line_of(node_));
    }
  }

  const std::string& path() const { return path_; }

  std::string key_path(const std::string& key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node node(const std::string& key)
  {
    used_.insert(key);
    return node_[key];
  }

  YAML::Node required(const std::string& key)
  {
    YAML::Node n = node(key);
    if (!n) {
      throw ConfigError("missing required key " + key_path(key) + line_of(node_));
    }
    return n;
  }

  template <class T>
  T value(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsScalar()) {
      throw ConfigError(key_path(key) + ": expected a scalar" + line_of(n));
    }
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key) + ": cannot read '" + n.Scalar() + "' as " + type_name<T>()
                        + line_of(n));
    }
  }

  template <class T>
  T get(const std::string& key, T fallback)
  {
    const YAML::Node n = node(key);
    return n ? value<T>(n, key) : fallback;
  }

  template <class T>
  T require(const std::string& key)
  {
    return value<T>(required(key), key);
  }

  template <class T>
  std::optional<T> maybe(const std::string& key)
  {
    const YAML::Node n = node(key);
    if (!n) {
      return std::nullopt;
    }
    return value<T>(n, key);
  }

  std::vector<double> numbers(const std::string& key)
  {
    const YAML::Node n = node(key);
    std::vector<double> out;
    if (!n) {
      return out;
    }
    if (!n.IsSequence()) {
      throw ConfigError(key_path(key) + ": expected a list of numbers" + line_of(n));
    }
    for (const auto& item : n) {
      out.push_back(value<double>(item, key));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback)
  {
    const YAML::Node n = node(key);
    if (!n) {
      return fallback;
    }
    if (!n.IsSequence()) {
      throw ConfigError(key_path(key) + ": expected a list" + line_of(n));
    }
    std::vector<std::string> out;
    for (const auto& item : n) {
      out.push_back(value<std::string>(item, key));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what)
  {
    throw ConfigError(key_path(key) + ": " + what + line_of(node_[key] ? node_[key] : node_));
  }

  void finish() const
  {
    for (const auto& item : node_) {
      const std::string key = item.first.as<std::string>();
      if (!used_.count(key)) {
        throw ConfigError("unknown key " + key_path(key) + line_of(item.first));
      }
    }
  }

private:
  template <class T>
  static const char* type_name()
  {
    if constexpr (std::is_same_v<T, double>) {
      return "a number";
    } else if constexpr (std::is_same_v<T, bool>) {
      return "true or false";
    } else if constexpr (std::is_integral_v<T>) {
      return "an integer";
    } else {
      return "a string";
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

template <class Enum, std::size_t N>
Enum pick(Section& s, const std::string& key, const std::pair<Enum, std::string_view> (&table)[N],
          Enum fallback)
{
  const YAML::Node n = s.node(key);
  if (!n) {
    return fallback;
  }
  const auto text = s.value<std::string>(n, key);
  std::string options;
  for (const auto& [e, name] : table) {
    if (name == text) {
      return e;
    }
    options += (options.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError(s.key_path(key) + ": unknown value '" + text + "' (expected one of " + options
                    + ")" + line_of(n));
}

constexpr std::pair<ProfileKind, std::string_view> kProfiles[] = {
    {ProfileKind::graded, "graded"},
    {ProfileKind::segmented, "segmented"},
    {ProfileKind::explicit_list, "explicit"},
};
constexpr std::pair<Backend, std::string_view> kBackends[] = {
    {Backend::moments, "moments"},
    {Backend::lyapunov, "lyapunov"},
};
constexpr std::pair<Scheme, std::string_view> kSchemes[] = {
    {Scheme::stochastic_leapfrog, "leapfrog"},
    {Scheme::semi_implicit_euler_maruyama, "euler_maruyama"},
};
constexpr std::pair<SolverKind, std::string_view> kSolvers[] = {
    {SolverKind::algebraic, "algebraic"},
    {SolverKind::langevin, "langevin"},
};
constexpr std::pair<SweepKind, std::string_view> kSweeps[] = {
    {SweepKind::gradient, "gradient"},
    {SweepKind::map, "map"},
    {SweepKind::compare, "compare"},
};

template <class Enum, std::size_t N>
std::string_view name_of(Enum e, const std::pair<Enum, std::string_view> (&table)[N])
{
  for (const auto& [value, name] : table) {
    if (value == e) {
      return name;
    }
  }
  return "unknown";
}

void positive(Section& s, const std::string& key, double v)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    s.fail(key, "must be positive");
  }
}

void parse_chain(Section s, RunConfig& cfg)
{
  ScenarioSpec& sc = cfg.scenario;
  sc.species = species_preset(s.get<std::string>("species", "Mg24"));
  sc.sites = s.require<int>("N");
  if (sc.sites < 1) {
    s.fail("N", "must be at least 1");
  }
  const double f1 = s.require<double>("omega1_over_2pi_Hz");
  positive(s, "omega1_over_2pi_Hz", f1);
  sc.omega1 = 2.0 * std::numbers::pi * f1;
  sc.profile = pick(s, "profile", kProfiles, ProfileKind::graded);
  sc.delta_omega_ratio = s.get<double>("delta_omega_ratio", 0.0);
  sc.split_index = s.maybe<int>("split_index");
  sc.omega_ratios = s.numbers("omega_ratios");
  if (sc.profile == ProfileKind::explicit_list) {
    if (static_cast<int>(sc.omega_ratios.size()) != sc.sites) {
      s.fail("omega_ratios", "explicit profile needs exactly N frequency ratios");
    }
  } else if (!sc.omega_ratios.empty()) {
    s.fail("omega_ratios", "only allowed with profile: explicit");
  }
  if (sc.split_index && sc.profile != ProfileKind::segmented) {
    s.fail("split_index", "only allowed with profile: segmented");
  }

  const auto a_m = s.maybe<double>("a_m");
  const auto a_over_l = s.maybe<double>("a_over_l");
  if (a_m && a_over_l) {
    s.fail("a_m", "give either a_m or a_over_l, not both");
  }
  if (!a_m && !a_over_l) {
    throw ConfigError("missing required key " + s.key_path("a_m") + " or " + s.key_path("a_over_l"));
  }
  if (a_m) {
    positive(s, "a_m", *a_m);
    sc.lattice = LatticeSpec::in_metres(*a_m);
  } else {
    positive(s, "a_over_l", *a_over_l);
    sc.lattice = LatticeSpec::in_lengths(*a_over_l);
  }
  s.finish();
}

void parse_baths(Section s, RunConfig& cfg)
{
  BathSpec& b = cfg.scenario.baths;
  b.hot_detuning = s.require<double>("delta_H_over_Gamma");
  b.cold_detuning = s.require<double>("delta_C_over_Gamma");
  for (const char* key : {"delta_H_over_Gamma", "delta_C_over_Gamma"}) {
    const double d = std::string(key) == "delta_H_over_Gamma" ? b.hot_detuning : b.cold_detuning;
    if (!(d < 0.0)) {
      s.fail(key, "positive detuning: bath model requires cooling (detuning must be below zero)");
    }
  }
  b.intensity_ratio = s.get<double>("intensity_ratio", b.intensity_ratio);
  if (!(b.intensity_ratio >= 0.0) || !std::isfinite(b.intensity_ratio)) {
    s.fail("intensity_ratio", "must be non-negative");
  }
  b.n_left = s.get<int>("N_L", b.n_left);
  b.n_right = s.get<int>("N_R", b.n_right);
  if (b.n_left < 0) {
    s.fail("N_L", "must be non-negative");
  }
  if (b.n_right < 0) {
    s.fail("N_R", "must be non-negative");
  }
  if (b.n_left + b.n_right > cfg.scenario.sites) {
    s.fail("N_R", "bath regions overlap: N_L + N_R exceeds N");
  }
  s.finish();
}

void parse_solver(Section s, RunConfig& cfg)
{
  SolverOptions& so = cfg.solver;
  so.backend = pick(s, "backend", kBackends, so.backend);
  so.tolerances.energy_balance = s.get<double>("energy_balance_tol", so.tolerances.energy_balance);
  so.tolerances.moment_residual = s.get<double>("moment_residual_tol", so.tolerances.moment_residual);
  cfg.equilibrium.tolerance = s.get<double>("equilibrium_tol", cfg.equilibrium.tolerance);
  for (const char* key : {"energy_balance_tol", "moment_residual_tol", "equilibrium_tol"}) {
    const double v = std::string(key) == "energy_balance_tol" ? so.tolerances.energy_balance
                     : std::string(key) == "moment_residual_tol" ? so.tolerances.moment_residual
                                                                 : cfg.equilibrium.tolerance;
    if (!(v > 0.0 && v < 1.0)) {
      s.fail(key, "must lie in (0, 1)");
    }
  }
  s.finish();
}

void parse_langevin(Section s, RunConfig& cfg)
{
  LangevinSettings& ls = cfg.solver.langevin;
  EnsembleSpec& es = cfg.solver.ensemble;
  ls.scheme = pick(s, "scheme", kSchemes, ls.scheme);
  ls.factors.dt_factor = s.get<double>("dt_factor", ls.factors.dt_factor);
  ls.factors.burn_in_factor = s.get<double>("burn_in_factor", ls.factors.burn_in_factor);
  ls.factors.t_end_factor = s.get<double>("t_end_factor", ls.factors.t_end_factor);
  es.n_trials = s.get<int>("n_trials", es.n_trials);
  es.master_seed = s.get<std::uint64_t>("master_seed", es.master_seed);
  ls.sample_stride = s.get<int>("sample_stride", ls.sample_stride);
  ls.series_stride = s.get<int>("series_stride", ls.series_stride);
  ls.window_bins = s.get<int>("window_bins", ls.window_bins);
  ls.linearized = s.get<bool>("linearized", ls.linearized);

  if (!(ls.factors.dt_factor > 0.0 && ls.factors.dt_factor <= 0.05)) {
    s.fail("dt_factor", "must lie in (0, 0.05]");
  }
  if (!(ls.factors.burn_in_factor >= 0.0)) {
    s.fail("burn_in_factor", "must be non-negative");
  }
  if (!(ls.factors.t_end_factor > ls.factors.burn_in_factor) || !std::isfinite(ls.factors.t_end_factor)) {
    s.fail("t_end_factor", "must exceed burn_in_factor");
  }
  if (es.n_trials < 1) {
    s.fail("n_trials", "must be at least 1");
  }
  for (const char* key : {"sample_stride", "series_stride", "window_bins"}) {
    const int v = std::string(key) == "sample_stride"   ? ls.sample_stride
                  : std::string(key) == "series_stride" ? ls.series_stride
                                                        : ls.window_bins;
    if (v < 1) {
      s.fail(key, "must be at least 1");
    }
  }
  s.finish();
}

AxisConfig parse_axis(Section s)
{
  AxisConfig axis;
  axis.parameter = s.require<std::string>("parameter");
  try {
    parse_parameter(axis.parameter);
  } catch (const ConfigError& e) {
    s.fail("parameter", e.what());
  }
  axis.start = s.maybe<double>("start");
  axis.stop = s.maybe<double>("stop");
  axis.points = s.maybe<int>("points");
  axis.values = s.numbers("values");
  const bool range = axis.start || axis.stop || axis.points;
  if (range && !axis.values.empty()) {
    s.fail("values", "give either values or start/stop/points, not both");
  }
  if (range && !(axis.start && axis.stop && axis.points)) {
    s.fail("points", "a range needs start, stop and points");
  }
  if (!range && axis.values.empty()) {
    throw ConfigError("missing required key " + s.key_path("values") + " or start/stop/points");
  }
  if (axis.points && *axis.points < 1) {
    s.fail("points", "must be at least 1");
  }
  s.finish();
  try {
    axis.axis().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  return axis;
}

void parse_sweep(Section s, RunConfig& cfg)
{
  SweepConfig sw;
  sw.kind = pick(s, "kind", kSweeps, sw.kind);
  sw.solver = pick(s, "solver", kSolvers, sw.solver);
  sw.axis1 = parse_axis(Section(s.required("axis1"), s.key_path("axis1")));
  if (const YAML::Node n = s.node("axis2")) {
    sw.axis2 = parse_axis(Section(n, s.key_path("axis2")));
  }
  const bool gradient_axis = sw.axis1.parameter == "delta_omega_ratio";
  switch (sw.kind) {
    case SweepKind::gradient:
    case SweepKind::compare:
      if (!gradient_axis || sw.axis2) {
        s.fail("axis1", "gradient and compare sweeps take a single delta_omega_ratio axis");
      }
      break;
    case SweepKind::map:
      if (!gradient_axis || !sw.axis2 || sw.axis2->parameter != "lattice_ratio") {
        s.fail("axis2", "map sweeps take axis1 delta_omega_ratio and axis2 lattice_ratio");
      }
      break;
  }
  s.finish();
  cfg.sweep = std::move(sw);
}

void parse_output(Section s, RunConfig& cfg)
{
  OutputConfig& out = cfg.output;
  out.directory = s.get<std::string>("directory", out.directory);
  out.stem = s.get<std::string>("stem", out.stem);
  out.formats = s.strings("formats", out.formats);
  if (out.formats.empty()) {
    s.fail("formats", "needs at least one of csv, json");
  }
  for (const auto& f : out.formats) {
    if (f != "csv" && f != "json") {
      s.fail("formats", "unknown format '" + f + "' (expected csv or json)");
    }
  }
  s.finish();
}

// Shortest round-trip text; plain decimals for moderate magnitudes.
std::string number(double v)
{
  char buf[64];
  const double mag = std::abs(v);
  const auto format = v == 0.0 || (mag >= 1e-4 && mag < 1e16) ? std::chars_format::fixed
                                                               : std::chars_format::scientific;
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, format);
  return std::string(buf, res.ptr);
}

/// Shortest decimal whose value times 2 pi reproduces omega exactly.
std::string hertz(double omega)
{
  const double two_pi = 2.0 * std::numbers::pi;
  const double guess = omega / two_pi;
  if (two_pi * guess == omega) {
    return number(guess);
  }
  double lo = guess;
  double hi = guess;
  for (int k = 0; k < 8; ++k) {
    lo = std::nextafter(lo, 0.0);
    hi = std::nextafter(hi, std::numeric_limits<double>::max());
    if (two_pi * lo == omega) return number(lo);
    if (two_pi * hi == omega) return number(hi);
  }
  return number(guess);
}

std::string quoted(const std::string& s)
{
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

std::string number_list(const std::vector<double>& values)
{
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? ", " : "") + number(values[i]);
  }
  return out + "]";
}

void dump_axis(std::ostringstream& os, const char* name, const AxisConfig& axis)
{
  os << "  " << name << ":\n";
  os << "    parameter: " << axis.parameter << "\n";
  if (axis.start) {
    os << "    start: " << number(*axis.start) << "\n";
    os << "    stop: " << number(*axis.stop) << "\n";
    os << "    points: " << *axis.points << "\n";
  } else {
    os << "    values: " << number_list(axis.values) << "\n";
  }
}

}  // namespace

std::vector<double> AxisConfig::grid() const
{
  if (start && stop && points) {
    return linear_grid(*start, *stop, *points);
  }
  return values;
}

SweepAxis AxisConfig::axis() const
{
  return {parse_parameter(parameter), grid()};
}

RunConfig parse_config(std::string_view text)
{
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root || root.IsNull()) {
    throw ConfigError("config is empty");
  }

  RunConfig cfg;
  Section top(root, "");
  parse_chain(Section(top.required("chain"), "chain"), cfg);
  parse_baths(Section(top.required("baths"), "baths"), cfg);
  if (const YAML::Node n = top.node("solver")) {
    parse_solver(Section(n, "solver"), cfg);
  }
  if (const YAML::Node n = top.node("langevin")) {
    parse_langevin(Section(n, "langevin"), cfg);
  }
  if (const YAML::Node n = top.node("sweep")) {
    parse_sweep(Section(n, "sweep"), cfg);
  }
  if (const YAML::Node n = top.node("output")) {
    parse_output(Section(n, "output"), cfg);
  }
  top.finish();

  try {
    cfg.scenario.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("chain: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const RunConfig& cfg)
{
  const ScenarioSpec& sc = cfg.scenario;
  const SolverOptions& so = cfg.solver;
  std::ostringstream os;
  os << "chain:\n";
  os << "  species: " << sc.species.name << "\n";
  os << "  N: " << sc.sites << "\n";
  os << "  omega1_over_2pi_Hz: " << hertz(sc.omega1) << "\n";
  os << "  profile: " << profile_name(sc.profile) << "\n";
  os << "  delta_omega_ratio: " << number(sc.delta_omega_ratio) << "\n";
  if (sc.split_index) {
    os << "  split_index: " << *sc.split_index << "\n";
  }
  if (sc.profile == ProfileKind::explicit_list) {
    os << "  omega_ratios: " << number_list(sc.omega_ratios) << "\n";
  }
  if (sc.lattice.kind == LatticeSpec::Kind::metres) {
    os << "  a_m: " << number(sc.lattice.value) << "\n";
  } else {
    os << "  a_over_l: " << number(sc.lattice.value) << "\n";
  }
  os << "baths:\n";
  os << "  delta_H_over_Gamma: " << number(sc.baths.hot_detuning) << "\n";
  os << "  delta_C_over_Gamma: " << number(sc.baths.cold_detuning) << "\n";
  os << "  intensity_ratio: " << number(sc.baths.intensity_ratio) << "\n";
  os << "  N_L: " << sc.baths.n_left << "\n";
  os << "  N_R: " << sc.baths.n_right << "\n";
  os << "solver:\n";
  os << "  backend: " << backend_name(so.backend) << "\n";
  os << "  energy_balance_tol: " << number(so.tolerances.energy_balance) << "\n";
  os << "  moment_residual_tol: " << number(so.tolerances.moment_residual) << "\n";
  os << "  equilibrium_tol: " << number(cfg.equilibrium.tolerance) << "\n";
  os << "langevin:\n";
  os << "  scheme: " << scheme_name(so.langevin.scheme) << "\n";
  os << "  dt_factor: " << number(so.langevin.factors.dt_factor) << "\n";
  os << "  burn_in_factor: " << number(so.langevin.factors.burn_in_factor) << "\n";
  os << "  t_end_factor: " << number(so.langevin.factors.t_end_factor) << "\n";
  os << "  n_trials: " << so.ensemble.n_trials << "\n";
  os << "  master_seed: " << so.ensemble.master_seed << "\n";
  os << "  sample_stride: " << so.langevin.sample_stride << "\n";
  os << "  series_stride: " << so.langevin.series_stride << "\n";
  os << "  window_bins: " << so.langevin.window_bins << "\n";
  os << "  linearized: " << (so.langevin.linearized ? "true" : "false") << "\n";
  if (cfg.sweep) {
    os << "sweep:\n";
    os << "  kind: " << sweep_kind_name(cfg.sweep->kind) << "\n";
    os << "  solver: " << solver_kind_name(cfg.sweep->solver) << "\n";
    dump_axis(os, "axis1", cfg.sweep->axis1);
    if (cfg.sweep->axis2) {
      dump_axis(os, "axis2", *cfg.sweep->axis2);
    }
  }
  os << "output:\n";
  os << "  directory: " << quoted(cfg.output.directory) << "\n";
  os << "  stem: " << quoted(cfg.output.stem) << "\n";
  os << "  formats: [";
  for (std::size_t i = 0; i < cfg.output.formats.size(); ++i) {
    os << (i ? ", " : "") << cfg.output.formats[i];
  }
  os << "]\n";
  return os.str();
}

std::string config_hash(const RunConfig& config)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_config(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view sweep_kind_name(SweepKind kind) { return name_of(kind, kSweeps); }
std::string_view solver_kind_name(SolverKind kind) { return name_of(kind, kSolvers); }
std::string_view backend_name(Backend backend) { return name_of(backend, kBackends); }
std::string_view scheme_name(Scheme scheme) { return name_of(scheme, kSchemes); }
std::string_view profile_name(ProfileKind kind) { return name_of(kind, kProfiles); }

}  // namespace ionflux
