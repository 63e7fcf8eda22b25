#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ionflux/errors.hpp"
#include "ionflux/experiments.hpp"

using namespace ionflux;

namespace {

ScenarioSpec small_scenario()
{
  ScenarioSpec s;
  s.sites = 6;
  s.omega1 = 2.0 * std::numbers::pi * 1e6;
  s.lattice = LatticeSpec::in_lengths(4.0);
  s.delta_omega_ratio = 0.3;
  s.baths.n_left = 2;
  s.baths.n_right = 2;
  return s;
}

SweepRow row_at(double x, double r)
{
  SweepRow row;
  row.parameters = {x};
  row.R = r;
  return row;
}

SweepResult gradient_rows(std::vector<SweepRow> rows)
{
  return {{"delta_omega_ratio"}, std::move(rows)};
}

}  // namespace

TEST_CASE("uniform chain does not rectify")
{
  ScenarioSpec s = small_scenario();
  s.delta_omega_ratio = 0.0;
  const BiasPair pair = run_bias_pair(s, {});
  CHECK(pair.forward > 0.0);
  CHECK(pair.backward == doctest::Approx(pair.forward).epsilon(1e-8));
  CHECK(std::abs(pair.rectification) < 1e-8);
  CHECK(pair.energy_balance < 1e-8);
}

TEST_CASE("graded chain rectifies and R is recomputable from the currents")
{
  const BiasPair pair = run_bias_pair(small_scenario(), {});
  CHECK(pair.forward != pair.backward);
  CHECK(pair.rectification == rectification_factor(pair.forward, pair.backward));
  CHECK(std::abs(pair.rectification) <= 1.0);
}

TEST_CASE("both backends give the same bias pair")
{
  SolverOptions lyap;
  lyap.backend = Backend::lyapunov;
  const BiasPair a = run_bias_pair(small_scenario(), {});
  const BiasPair b = run_bias_pair(small_scenario(), lyap);
  CHECK(b.forward == doctest::Approx(a.forward).epsilon(1e-8));
  CHECK(b.rectification == doctest::Approx(a.rectification).epsilon(1e-6));
}

TEST_CASE("equal or inverted bath temperatures are rejected")
{
  ScenarioSpec s = small_scenario();
  s.baths.hot_detuning = s.baths.cold_detuning = -0.05;
  CHECK_THROWS_WITH_AS(run_bias_pair(s, {}), doctest::Contains("rectification undefined"), SolverError);
  s = small_scenario();
  std::swap(s.baths.hot_detuning, s.baths.cold_detuning);
  CHECK_THROWS_AS(run_bias_pair(s, {}), ConfigError);
}

TEST_CASE("failures name the bias direction")
{
  ScenarioSpec s = small_scenario();
  s.baths.intensity_ratio = 0.0;
  CHECK_THROWS_WITH_AS(run_bias_pair(s, {}), doctest::Contains("forward bias: no dissipation"), SolverError);
}

TEST_CASE("linear grid")
{
  CHECK(linear_grid(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(linear_grid(2.0, 9.0, 1) == std::vector<double>{2.0});
  CHECK(linear_grid(0.025, 1.5, 60).back() == 1.5);
  CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), ConfigError);
}

TEST_CASE("sweep axes are validated")
{
  CHECK_THROWS_AS(SweepAxis({SweepParameter::delta_omega_ratio, {}}).validate(), ConfigError);
  CHECK_THROWS_AS(SweepAxis({SweepParameter::delta_omega_ratio, {0.1, 0.1}}).validate(), ConfigError);
  CHECK_THROWS_AS(SweepAxis({SweepParameter::lattice_ratio, {-1.0, 2.0}}).validate(), ConfigError);
  CHECK_THROWS_AS(SweepAxis({SweepParameter::sites, {2.5}}).validate(), ConfigError);
  CHECK_THROWS_AS(SweepAxis({SweepParameter::profile, {0.0, 2.0}}).validate(), ConfigError);
  CHECK_NOTHROW(SweepAxis({SweepParameter::delta_omega_ratio, {0.5, 0.2, 0.0}}).validate());
  CHECK(parse_parameter("lattice_ratio") == SweepParameter::lattice_ratio);
  CHECK(parameter_name(SweepParameter::sites) == "N");
  CHECK_THROWS_AS(parse_parameter("temperature"), ConfigError);
}

TEST_CASE("parameters are applied to the scenario")
{
  const ScenarioSpec base = small_scenario();
  CHECK(apply_parameter(base, SweepParameter::delta_omega_ratio, 0.7).delta_omega_ratio == 0.7);
  CHECK(apply_parameter(base, SweepParameter::lattice_ratio, 5.0).lattice == LatticeSpec::in_lengths(5.0));
  CHECK(apply_parameter(base, SweepParameter::omega1, 2e6).omega1 == doctest::Approx(2.0 * std::numbers::pi * 2e6));
  CHECK(apply_parameter(base, SweepParameter::sites, 9.0).sites == 9);
  CHECK(apply_parameter(base, SweepParameter::profile, 1.0).profile == ProfileKind::segmented);
}

TEST_CASE("zero crossings by linear interpolation")
{
  const auto one = find_zero_crossings(gradient_rows({row_at(0.1, 0.2), row_at(0.2, -0.2)}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.15));
  CHECK(find_zero_crossings(gradient_rows({row_at(0.1, 0.0), row_at(0.2, 0.0), row_at(0.3, 0.0)})).empty());

  // A failed row and the zero-gradient row are skipped.
  SweepRow failed = row_at(0.2, std::nan(""));
  failed.status = "error: test";
  const auto skip = find_zero_crossings(
      gradient_rows({row_at(0.0, 0.0), row_at(0.1, 0.4), failed, row_at(0.3, -0.4)}));
  REQUIRE(skip.size() == 1);
  CHECK(skip[0] == doctest::Approx(0.2));

  const auto touch = find_zero_crossings(gradient_rows({row_at(1, 1), row_at(2, 0), row_at(3, -1)}));
  CHECK(touch == std::vector<double>{2.0});
}

TEST_CASE("gradient sweep matches independent bias pairs in any order")
{
  SweepSpec spec;
  spec.base = small_scenario();
  spec.axis1 = {SweepParameter::delta_omega_ratio, {0.1, 0.4, 0.8}};
  const SweepResult up = sweep_gradient(spec);
  spec.axis1.values = {0.8, 0.4, 0.1};
  spec.solver.threads = 1;
  const SweepResult down = sweep_gradient(spec);
  REQUIRE(up.rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const SweepRow& a = up.rows[k];
    const SweepRow& b = down.rows[2 - k];
    CHECK(a.ok());
    CHECK(a.J_forward == b.J_forward);
    CHECK(a.R == b.R);
    CHECK(a.R == rectification_factor(a.J_forward, a.J_backward));
    const BiasPair pair = run_bias_pair(apply_parameter(spec.base, SweepParameter::delta_omega_ratio,
                                                        a.parameters[0]),
                                        {});
    CHECK(a.J_forward == pair.forward);
    CHECK(a.J_backward == pair.backward);
  }
}

TEST_CASE("one-point map equals the bias pair")
{
  SweepSpec spec;
  spec.base = small_scenario();
  spec.axis1 = {SweepParameter::delta_omega_ratio, {0.25}};
  spec.axis2 = SweepAxis{SweepParameter::lattice_ratio, {3.5}};
  const SweepResult map = sweep_map(spec);
  REQUIRE(map.rows.size() == 1);
  CHECK(map.axis_names == std::vector<std::string>{"delta_omega_ratio", "lattice_ratio"});
  ScenarioSpec point = small_scenario();
  point.delta_omega_ratio = 0.25;
  point.lattice = LatticeSpec::in_lengths(3.5);
  const BiasPair pair = run_bias_pair(point, {});
  CHECK(map.rows[0].J_forward == pair.forward);
  CHECK(map.rows[0].R == pair.rectification);
}

TEST_CASE("map rows vary axis1 fastest")
{
  SweepSpec spec;
  spec.base = small_scenario();
  spec.axis1 = {SweepParameter::delta_omega_ratio, {0.1, 0.2}};
  spec.axis2 = SweepAxis{SweepParameter::lattice_ratio, {3.0, 4.0, 5.0}};
  const SweepResult map = sweep_map(spec);
  REQUIRE(map.rows.size() == 6);
  CHECK(map.rows[1].parameters == std::vector<double>{0.2, 3.0});
  CHECK(map.rows[2].parameters == std::vector<double>{0.1, 4.0});
  CHECK_THROWS_AS(sweep_gradient(spec), ConfigError);
}

TEST_CASE("failing grid points are recorded without aborting the sweep")
{
  SweepSpec spec;
  spec.base = small_scenario();
  spec.axis1 = {SweepParameter::delta_omega_ratio, {-1.5, 0.2}};
  const SweepResult result = run_sweep(spec);
  CHECK_FALSE(result.rows[0].ok());
  CHECK(result.rows[0].status.rfind("error: ", 0) == 0);
  CHECK(std::isnan(result.rows[0].R));
  CHECK(result.rows[1].ok());
}

TEST_CASE("profiles coincide without a gradient")
{
  const ProfileComparison cmp = compare_profiles(small_scenario(), {0.0, 0.5}, {});
  CHECK(cmp.graded.rows[0].max_flux() == doctest::Approx(cmp.segmented.rows[0].max_flux()).epsilon(1e-12));
  CHECK(std::abs(cmp.graded.rows[0].R) < 1e-8);
  CHECK(std::abs(cmp.segmented.rows[0].R) < 1e-8);
  CHECK(cmp.graded.rows[1].max_flux() != cmp.segmented.rows[1].max_flux());
}
