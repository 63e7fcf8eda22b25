#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionflux/experiments.hpp"

namespace ionflux {

/// Grid for one sweep axis: either an evenly spaced range or explicit values.
struct AxisConfig
{
  std::string parameter = "delta_omega_ratio";
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<int> points;
  std::vector<double> values;

  std::vector<double> grid() const;
  SweepAxis axis() const;

  bool operator==(const AxisConfig&) const = default;
};

enum class SweepKind
{
  gradient,
  map,
  compare,
};

struct SweepConfig
{
  SweepKind kind = SweepKind::gradient;
  AxisConfig axis1;
  std::optional<AxisConfig> axis2;
  SolverKind solver = SolverKind::algebraic;

  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig
{
  std::string directory;  // empty: write the primary table to stdout
  std::string stem;       // empty: the subcommand name
  std::vector<std::string> formats{"csv"};

  bool operator==(const OutputConfig&) const = default;
};

/// Full run description as read from a config file.
struct RunConfig
{
  ScenarioSpec scenario;
  SolverOptions solver;
  EquilibriumOptions equilibrium;
  std::optional<SweepConfig> sweep;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a YAML config. Unknown keys, missing keys and
/// out-of-range values raise ConfigError naming the key path and line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical YAML with every default filled in; parse_config(dump) == config.
std::string dump_config(const RunConfig& config);

/// 64-bit FNV-1a of the normalized dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::string_view sweep_kind_name(SweepKind kind);
std::string_view solver_kind_name(SolverKind kind);
std::string_view backend_name(Backend backend);
std::string_view scheme_name(Scheme scheme);
std::string_view profile_name(ProfileKind kind);

}  // namespace ionflux
