#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ionflux/chain.hpp"
#include "ionflux/errors.hpp"

using namespace ionflux;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Independent evaluation of l = (q^2 / (4 pi eps0 m omega^2))^(1/3) for 24Mg+.
double reference_length(double omega)
{
  const double q = 1.602176634e-19;
  const double eps0 = 8.8541878128e-12;
  const double m = 23.985041697 * 1.66053906660e-27 - 9.1093837015e-31;
  return std::cbrt(q * q / (4.0 * std::numbers::pi * eps0 * m * omega * omega));
}

Chain uniform_chain(int n, double lattice)
{
  Chain c;
  c.units = Units::for_species(magnesium24(), kTwoPi * 1e6);
  c.lattice = lattice;
  c.omega = Eigen::VectorXd::Ones(n);
  c.centers = Eigen::VectorXd::LinSpaced(n, lattice, n * lattice);
  return c;
}

}  // namespace

TEST_CASE("characteristic length matches direct evaluation")
{
  const IonSpecies mg = magnesium24();
  for (double f : {50e3, 1e6, 3.3e6}) {
    CHECK(characteristic_length(mg, kTwoPi * f) == doctest::Approx(reference_length(kTwoPi * f)).epsilon(1e-12));
  }
}

TEST_CASE("characteristic length for the two quoted trap frequencies")
{
  const IonSpecies mg = magnesium24();
  CHECK(std::abs(characteristic_length(mg, kTwoPi * 1e6) / 5.25e-6 - 1.0) < 0.005);
  CHECK(std::abs(characteristic_length(mg, kTwoPi * 50e3) / 38.7e-6 - 1.0) < 0.005);
}

TEST_CASE("characteristic length rejects a non-positive frequency")
{
  CHECK_THROWS_AS(characteristic_length(magnesium24(), 0.0), ConfigError);
}

TEST_CASE("species presets")
{
  CHECK(species_preset("24Mg+") == magnesium24());
  CHECK(species_preset("Mg24") == magnesium24());
  CHECK_THROWS_AS(species_preset("Be9"), ConfigError);
}

TEST_CASE("graded profile is linear with exact end point")
{
  const auto w = materialize_frequencies(FrequencyProfile::graded(2.0, 0.7), 15);
  REQUIRE(w.size() == 15);
  for (int n = 0; n < 15; ++n) {
    CHECK(w[n] == doctest::Approx(2.0 + 0.7 * n / 14.0).epsilon(1e-15));
  }
  CHECK(w.back() == 2.0 + 0.7);
  CHECK(materialize_frequencies(FrequencyProfile::graded(2.0, 0.7), 1) == std::vector<double>{2.0});
}

TEST_CASE("segmented profile splits at ceil(N/2) by default")
{
  const auto even = materialize_frequencies(FrequencyProfile::segmented(1.0, 0.5), 4);
  CHECK(even == std::vector<double>{1.0, 1.0, 1.5, 1.5});
  const auto odd = materialize_frequencies(FrequencyProfile::segmented(1.0, 0.5), 5);
  CHECK(odd == std::vector<double>{1.0, 1.0, 1.0, 1.5, 1.5});
  const auto split = materialize_frequencies(FrequencyProfile::segmented(1.0, 0.5, 1), 3);
  CHECK(split == std::vector<double>{1.0, 1.5, 1.5});
  CHECK_THROWS_AS(materialize_frequencies(FrequencyProfile::segmented(1.0, 0.5), 1), ConfigError);
  CHECK_THROWS_AS(materialize_frequencies(FrequencyProfile::segmented(1.0, 0.5, 7), 4), ConfigError);
}

TEST_CASE("non-positive frequencies are rejected")
{
  CHECK_THROWS_AS(materialize_frequencies(FrequencyProfile::graded(1.0, -1.5), 3), ConfigError);
  CHECK_THROWS_AS(materialize_frequencies(FrequencyProfile::explicit_values({1.0, 0.0}), 2), ConfigError);
  CHECK_THROWS_AS(materialize_frequencies(FrequencyProfile::explicit_values({1.0}), 2), ConfigError);
}

TEST_CASE("chain in natural units")
{
  ChainConfig cfg;
  cfg.sites = 5;
  cfg.species = magnesium24();
  cfg.profile = FrequencyProfile::graded(kTwoPi * 1e6, kTwoPi * 0.2e6);
  cfg.lattice_constant = 25e-6;
  const Chain c = Chain::from_config(cfg);
  CHECK(c.lattice == doctest::Approx(25e-6 / reference_length(kTwoPi * 1e6)).epsilon(1e-12));
  CHECK(c.omega[0] == 1.0);
  CHECK(c.omega[4] == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(c.centers[2] == doctest::Approx(3.0 * c.lattice).epsilon(1e-15));
  const auto centers = cfg.trap_centers();
  CHECK(centers[4] == doctest::Approx(5 * 25e-6));
}

TEST_CASE("single ion sits at its trap centre")
{
  const Chain c = uniform_chain(1, 3.0);
  const EquilibriumState eq = equilibrium_positions(c);
  CHECK(eq.positions[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eq.iterations == 0);
}

TEST_CASE("two-ion equilibrium matches a bisection oracle")
{
  // Symmetric pair: x2 - x1 = d solves d = a + 2 / d^2.
  for (double a : {0.5, 1.0, 2.5, 6.0}) {
    double lo = a;
    double hi = a + 10.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (mid - a - 2.0 / (mid * mid) < 0.0 ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    const EquilibriumState eq = equilibrium_positions(uniform_chain(2, a));
    CHECK(eq.positions[1] - eq.positions[0] == doctest::Approx(d).epsilon(1e-11));
    CHECK(eq.positions[0] + eq.positions[1] == doctest::Approx(3.0 * a).epsilon(1e-12));
  }
}

TEST_CASE("equilibrium gradient vanishes and Hessian is positive definite")
{
  Chain c = uniform_chain(15, 4.76);
  c.omega = Eigen::VectorXd::LinSpaced(15, 1.0, 1.5);
  const EquilibriumState eq = equilibrium_positions(c);
  CHECK(eq.ordered);
  CHECK(potential_gradient(c, eq.positions).norm() < 1e-10);
  CHECK(is_positive_definite(hessian_at(c, eq.positions)));
  CHECK(eq.warnings.empty());
}

TEST_CASE("dense spacing warns but still converges")
{
  const EquilibriumState eq = equilibrium_positions(uniform_chain(6, 0.5));
  CHECK(eq.ordered);
  REQUIRE(eq.warnings.size() == 1);
  CHECK(eq.warnings[0].find("characteristic length") != std::string::npos);
}

TEST_CASE("finite-difference oracle for gradient and Hessian")
{
  Chain c = uniform_chain(5, 2.0);
  c.omega = Eigen::VectorXd::LinSpaced(5, 1.0, 1.3);
  Eigen::VectorXd x(5);
  x << 1.7, 4.1, 6.0, 8.3, 9.9;
  const double h = 1e-6;
  const Eigen::VectorXd g = potential_gradient(c, x);
  const Eigen::MatrixXd k = hessian_at(c, x);
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd up = x;
    Eigen::VectorXd dn = x;
    up[i] += h;
    dn[i] -= h;
    const double fd = (total_potential(c, up) - total_potential(c, dn)) / (2 * h);
    CHECK(std::abs(fd - g[i]) <= 1e-6 * std::max(1.0, std::abs(g[i])));
    const Eigen::VectorXd col = (potential_gradient(c, up) - potential_gradient(c, dn)) / (2 * h);
    CHECK((col - k.col(i)).norm() <= 1e-5 * k.norm());
  }
}

TEST_CASE("coincident or swapped ions are a singularity")
{
  const Chain c = uniform_chain(3, 2.0);
  Eigen::VectorXd x(3);
  x << 1.0, 1.0, 3.0;
  CHECK_THROWS_AS(total_potential(c, x), SingularityError);
  x << 2.0, 1.0, 3.0;
  CHECK_THROWS_AS(potential_gradient(c, x), SingularityError);
  CHECK_THROWS_AS(hessian_at(c, x), SingularityError);
}

TEST_CASE("mirrored chain reverses the profile and reflects positions")
{
  Chain c = uniform_chain(4, 2.0);
  c.omega << 1.0, 1.1, 1.2, 1.4;
  const Chain m = c.mirrored();
  CHECK(m.omega[0] == 1.4);
  CHECK(m.omega[3] == 1.0);
  const EquilibriumState a = equilibrium_positions(c);
  const EquilibriumState b = equilibrium_positions(m);
  const double span = c.centers[0] + c.centers[3];
  for (int i = 0; i < 4; ++i) {
    CHECK(b.positions[i] == doctest::Approx(span - a.positions[3 - i]).epsilon(1e-12));
  }
}

TEST_CASE("potential energy at the trap centres is pure Coulomb")
{
  const double a = 2.5;
  const Chain one = uniform_chain(1, a);
  CHECK(total_potential(one, one.centers) == 0.0);
  CHECK(potential_gradient(one, one.centers)[0] == 0.0);
  CHECK(hessian_at(one, one.centers)(0, 0) == 1.0);
  const Chain two = uniform_chain(2, a);
  CHECK(total_potential(two, two.centers) == doctest::Approx(1.0 / a).epsilon(1e-15));
  const Chain three = uniform_chain(3, a);
  CHECK(total_potential(three, three.centers) == doctest::Approx(2.5 / a).epsilon(1e-15));
  CHECK(hessian_at(two, two.centers)(0, 1) == doctest::Approx(-2.0 / (a * a * a)).epsilon(1e-15));
}
