#include <doctest.h>

#include <cmath>
#include <numbers>

#include "calsim/wavefunction.hpp"

using namespace calsim;

namespace {

// Trapezoid integral of |psi|^2 over a wide box.
double numeric_norm2_1d(const InitialWavefunction& psi, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    Vec y(1);
    y(0) = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::norm(psi(y));
  }
  return sum * h;
}

}  // namespace

TEST_CASE("gaussian packet is normalised") {
  const double eps = 1.0 / 64.0;
  const auto psi = InitialWavefunction::gaussian(eps);
  CHECK(psi.dimension() == 1);
  CHECK(psi.analytic_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(numeric_norm2_1d(psi, -3, 3, 6000) == doctest::Approx(1.0).epsilon(1e-12));
  Vec y(1);
  y(0) = 0.1;
  CHECK(std::abs(psi(y) - std::pow(std::numbers::pi * eps, -0.25) * std::exp(-0.01 / (2 * eps))) <
        1e-14);
}

TEST_CASE("boosted packet carries a plane-wave phase") {
  const double eps = 0.05;
  const auto psi = InitialWavefunction::gaussian(eps, 0.3, 1.2);
  Vec y(1);
  y(0) = 0.5;
  const complex expected = std::pow(std::numbers::pi * eps, -0.25) *
                           std::exp(-0.04 / (2 * eps)) * std::polar(1.0, 1.2 * 0.5 / eps);
  CHECK(std::abs(psi(y) - expected) < 1e-13);
  CHECK(psi.analytic_norm() == doctest::Approx(1.0));
}

TEST_CASE("double-well pair is normalised for several epsilon") {
  for (double eps : {1.0 / 16.0, 1.0 / 64.0, 0.2}) {
    const auto psi = InitialWavefunction::double_well_pair(eps);
    CHECK(psi.analytic_norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(numeric_norm2_1d(psi, -4, 4, 16000) == doctest::Approx(1.0).epsilon(1e-10));
  }
  const auto psi = InitialWavefunction::double_well_pair(1.0 / 64.0);
  Vec a(1), b(1);
  a(0) = 0.5;
  b(0) = -0.5;
  // Right packet dominates with ratio 1 : 0.8.
  CHECK(std::abs(psi(b)) / std::abs(psi(a)) == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("double-slit source is normalised") {
  for (double q1 : {0.425, 0.1}) {
    const double eps = 1.0 / 16.0;
    const auto psi = InitialWavefunction::double_slit(eps, q1, -1.0, 0.0, 8.0);
    CHECK(psi.dimension() == 2);
    CHECK(psi.analytic_norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("product wavefunctions multiply axis values") {
  const double eps = 1.0 / 32.0;
  const auto a = InitialWavefunction::gaussian(eps, 0.2, 0.0);
  const auto b = InitialWavefunction::double_well_pair(eps);
  const auto p = InitialWavefunction::product({a, b});
  CHECK(p.dimension() == 2);
  CHECK(p.analytic_norm() == doctest::Approx(1.0));
  Vec y(2), ya(1), yb(1);
  y << 0.1, 0.45;
  ya(0) = 0.1;
  yb(0) = 0.45;
  CHECK(std::abs(p(y) - a(ya) * b(yb)) < 1e-12);
  CHECK_THROWS_AS(InitialWavefunction::product({}), ConfigError);
  CHECK_THROWS_AS(InitialWavefunction::product({a, InitialWavefunction::gaussian(0.1)}), ConfigError);
  CHECK_THROWS_AS(InitialWavefunction::product({a, a, a, a}), ConfigError);
  CHECK_THROWS_AS(InitialWavefunction::gaussian(0.0), ConfigError);
}

TEST_CASE("axis factor norm closed form") {
  AxisFactor f{{{1.0, 0.0, 0.5}, {-0.3, 0.4, 0.2}}, 2.0};
  // Momentum does not change the modulus.
  const double h = 1e-3;
  double sum = 0.0;
  for (int i = -8000; i <= 8000; ++i) sum += std::norm(f(i * h, 0.1));
  CHECK(sum * h == doctest::Approx(f.norm_squared()).epsilon(1e-10));
}
