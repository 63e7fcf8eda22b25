#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ionflux/config.hpp"
#include "ionflux/errors.hpp"
#include "ionflux/presets.hpp"
#include "ionflux/report_io.hpp"

using namespace ionflux;

namespace {

std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string golden(const std::string& name)
{
  std::string text = read_file(std::string(IONFLUX_GOLDEN_DIR) + "/" + name + ".header");
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  return text;
}

std::string first_line(const std::string& text)
{
  return text.substr(0, text.find('\n'));
}

std::string fnv1a(const std::string& text)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h = (h ^ c) * 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* kMinimal = R"(chain:
  N: 6
  omega1_over_2pi_Hz: 1000000
  profile: graded
  delta_omega_ratio: 0.2
  a_over_l: 4
baths:
  delta_H_over_Gamma: -0.02
  delta_C_over_Gamma: -0.1
)";

std::string with(const std::string& base, const std::string& from, const std::string& to)
{
  std::string out = base;
  const auto pos = out.find(from);
  REQUIRE(pos != std::string::npos);
  out.replace(pos, from.size(), to);
  return out;
}

SweepResult tiny_sweep()
{
  SweepSpec spec;
  spec.base = parse_config(kMinimal).scenario;
  spec.axis1 = {SweepParameter::delta_omega_ratio, {0.1, 0.2, 0.3}};
  return sweep_gradient(spec);
}

}  // namespace

TEST_CASE("shipped presets")
{
  CHECK(preset_names() == std::vector<std::string>{"fig2", "fig3", "fig4", "fig5"});
  CHECK_THROWS_AS(preset_text("fig9"), ConfigError);
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const std::string text(preset_text(name));
    CHECK(text == read_file(std::string(IONFLUX_PRESET_DIR) + "/" + name + ".yaml"));
    const RunConfig cfg = parse_config(text);
    CHECK(dump_config(cfg) == text);
    CHECK(parse_config(dump_config(cfg)) == cfg);
  }
}

TEST_CASE("preset contents")
{
  const RunConfig fig2 = parse_config(preset_text("fig2"));
  CHECK(fig2.scenario.sites == 15);
  CHECK(fig2.scenario.omega1 == doctest::Approx(2.0 * std::numbers::pi * 50e3));
  CHECK(fig2.scenario.lattice == LatticeSpec::in_metres(50e-6));
  CHECK(fig2.solver.ensemble.n_trials == 1000);
  CHECK_FALSE(fig2.sweep.has_value());

  const RunConfig fig3 = parse_config(preset_text("fig3"));
  REQUIRE(fig3.sweep.has_value());
  CHECK(fig3.sweep->kind == SweepKind::gradient);
  const auto grid = fig3.sweep->axis1.grid();
  CHECK(grid.size() == 60);
  CHECK(grid.front() == 0.025);
  CHECK(grid.back() == 1.5);
  CHECK(fig3.scenario.lattice == LatticeSpec::in_lengths(4.76));

  const RunConfig fig4 = parse_config(preset_text("fig4"));
  REQUIRE(fig4.sweep->axis2.has_value());
  CHECK(fig4.sweep->axis2->parameter == "lattice_ratio");
  CHECK(parse_config(preset_text("fig5")).sweep->kind == SweepKind::compare);
}

TEST_CASE("defaults are filled in and round-trip")
{
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.scenario.baths.intensity_ratio == 0.08);
  CHECK(cfg.scenario.baths.n_left == 3);
  CHECK(cfg.output.formats == std::vector<std::string>{"csv"});
  CHECK(parse_config(dump_config(cfg)) == cfg);
  CHECK(dump_config(parse_config(dump_config(cfg))) == dump_config(cfg));
}

TEST_CASE("config hash is FNV-1a of the normalized dump")
{
  CHECK(fnv1a("a") == "af63dc4c8601ec8c");
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(config_hash(cfg) == fnv1a(dump_config(cfg)));
  RunConfig other = cfg;
  other.solver.ensemble.master_seed = 2;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("unknown keys are reported with path and line")
{
  const std::string text = with(kMinimal, "  a_over_l: 4\n", "  a_over_l: 4\n  colour: red\n");
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("unknown key chain.colour (line 7)"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(std::string(kMinimal) + "extra: 1\n"), doctest::Contains("unknown key extra"),
                       ConfigError);
}

TEST_CASE("missing keys are reported")
{
  CHECK_THROWS_WITH_AS(parse_config(with(kMinimal, "  N: 6\n", "")), doctest::Contains("missing required key chain.N"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with(kMinimal, "  a_over_l: 4\n", "")), doctest::Contains("chain.a_m"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("chain: {}\n"), doctest::Contains("missing required key"), ConfigError);
}

TEST_CASE("conflicting and out-of-range values")
{
  CHECK_THROWS_WITH_AS(parse_config(with(kMinimal, "  a_over_l: 4\n", "  a_over_l: 4\n  a_m: 2e-5\n")),
                       doctest::Contains("either a_m or a_over_l"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with(kMinimal, "delta_H_over_Gamma: -0.02", "delta_H_over_Gamma: 0.1")),
                       doctest::Contains("positive detuning: bath model requires cooling"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(with(kMinimal, "delta_H_over_Gamma: -0.02", "delta_H_over_Gamma: 0.1")),
                       doctest::Contains("(line 8)"), ConfigError);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "N: 6", "N: 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "N: 6", "N: four")), ConfigError);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "profile: graded", "profile: wavy")), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "langevin:\n  dt_factor: 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "output:\n  formats: [xml]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("chain: [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("sweep sections are checked for their kind")
{
  const std::string map_with_one_axis = std::string(kMinimal)
                                        + "sweep:\n  kind: map\n  axis1:\n    parameter: delta_omega_ratio\n"
                                          "    values: [0.1, 0.2]\n";
  CHECK_THROWS_WITH_AS(parse_config(map_with_one_axis), doctest::Contains("sweep.axis2"), ConfigError);
  const std::string both = std::string(kMinimal)
                           + "sweep:\n  axis1:\n    parameter: delta_omega_ratio\n    values: [0.1]\n"
                             "    start: 0.1\n    stop: 0.2\n    points: 2\n";
  CHECK_THROWS_AS(parse_config(both), ConfigError);
  const std::string ok = std::string(kMinimal)
                         + "sweep:\n  axis1:\n    parameter: delta_omega_ratio\n    values: [0.1, 0.3]\n";
  const RunConfig cfg = parse_config(ok);
  CHECK(cfg.sweep->axis1.grid() == std::vector<double>{0.1, 0.3});
}

TEST_CASE("table headers match the golden files")
{
  CHECK(std::string(kSteadyHeader) == golden("steady"));
  CHECK(std::string(kLangevinHeader) == golden("langevin"));
  CHECK(std::string(kSeriesHeader) == golden("series"));
  CHECK(std::string(kCompareHeader) == golden("compare"));
  CHECK(sweep_header(SweepResult{{"delta_omega_ratio"}, {}}) == golden("sweep"));
  CHECK(sweep_header(SweepResult{{"delta_omega_ratio", "lattice_ratio"}, {}}) == golden("map"));
}

TEST_CASE("steady CSV has one row per site")
{
  const RunConfig cfg = parse_config(kMinimal);
  const SteadyStateReport report = steady_state_report(prepare_scenario(cfg.scenario, Bias::forward));
  std::ostringstream out;
  write_steady_csv(out, report);
  const std::string text = out.str();
  CHECK(first_line(text) == golden("steady"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.find("\n1,1,") != std::string::npos);
}

TEST_CASE("sweep output is deterministic and carries provenance")
{
  const RunConfig cfg = parse_config(kMinimal);
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(a, tiny_sweep());
  write_sweep_csv(b, tiny_sweep());
  CHECK(a.str() == b.str());
  CHECK(first_line(a.str()) == golden("sweep"));

  const nlohmann::json doc = sweep_json(tiny_sweep(), make_provenance("sweep", cfg, "algebraic"));
  CHECK(doc["provenance"]["tool"] == "ionflux");
  CHECK(doc["provenance"]["version"] == version_string());
  CHECK(doc["provenance"]["command"] == "sweep");
  CHECK(doc["provenance"]["config_hash"] == config_hash(cfg));
  CHECK(doc["provenance"]["solver"] == "algebraic");
  CHECK(doc["rows"].size() == 3);
  CHECK(doc.contains("zero_crossings"));
}

TEST_CASE("failed rows keep their status in the CSV")
{
  SweepResult r{{"delta_omega_ratio"}, {}};
  SweepRow row;
  row.parameters = {0.5};
  row.status = "error: forward bias: a, b";
  r.rows.push_back(row);
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(out.str().find("\"error: forward bias: a, b\"") != std::string::npos);
}
