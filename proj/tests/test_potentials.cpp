#include <doctest.h>

#include <cmath>

#include "calsim/potentials.hpp"

using namespace calsim;
using namespace calsim::potentials;

namespace {

Vec point(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Central-difference gradient and Hessian.
void check_derivatives(const PotentialModel& m, const Vec& x, double tol) {
  const double h = 1e-5;
  const int D = m.dimension();
  const Vec g = m.gradient(x);
  const Mat H = m.hessian(x);
  for (int d = 0; d < D; ++d) {
    Vec xp = x, xm = x;
    xp(d) += h;
    xm(d) -= h;
    const double fd = (m.value(xp) - m.value(xm)) / (2.0 * h);
    CHECK(g(d) == doctest::Approx(fd).epsilon(tol).scale(1.0));
    const Vec gd = (m.gradient(xp) - m.gradient(xm)) / (2.0 * h);
    for (int e = 0; e < D; ++e) CHECK(H(e, d) == doctest::Approx(gd(e)).epsilon(tol).scale(1.0));
  }
  CHECK((H - H.transpose()).norm() == 0.0);
}

}  // namespace

TEST_CASE("smoothstep endpoints and derivatives") {
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  for (double t : {0.0, 1.0}) {
    CHECK(smoothstep_d1(t) == 0.0);
    CHECK(smoothstep_d2(t) == 0.0);
  }
  const double h = 1e-6;
  for (double t : {0.1, 0.4, 0.8}) {
    CHECK(smoothstep_d1(t) == doctest::Approx((smoothstep(t + h) - smoothstep(t - h)) / (2 * h)));
    CHECK(smoothstep_d2(t) ==
          doctest::Approx((smoothstep_d1(t + h) - smoothstep_d1(t - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(smoothstep(1.5), std::domain_error);
  CHECK_THROWS_AS(smoothstep_d1(-0.1), std::domain_error);
}

TEST_CASE("harmonic potential") {
  const auto m = PotentialModel::harmonic(2);
  const Vec x = point({0.3, -1.2});
  CHECK(m.value(x) == doctest::Approx(0.5 * (0.09 + 1.44)));
  CHECK((m.gradient(x) - x).norm() == 0.0);
  CHECK(m.hessian(x).isIdentity());
  check_derivatives(m, x, 1e-8);
  CHECK_THROWS_AS(m.value(point({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(PotentialModel::harmonic(4), ConfigError);
}

TEST_CASE("double well potential") {
  const auto m = PotentialModel::double_well();
  CHECK(m.value(point({0.5})) == doctest::Approx(-0.125));
  CHECK(m.gradient(point({0.5}))(0) == doctest::Approx(0.0));
  CHECK(m.hessian(point({0.5}))(0, 0) == doctest::Approx(4.0));
  CHECK(m.hessian(point({0.0}))(0, 0) == doctest::Approx(-2.0));
  for (double x : {-1.1, -0.3, 0.0, 0.7}) check_derivatives(m, point({x}), 1e-7);
}

TEST_CASE("double slit potential shape") {
  const DoubleSlitParameters p;
  const auto m = PotentialModel::double_slit(p);
  // Solid barrier on the centre line, open inside a slit, zero away from the barrier.
  CHECK(m.value(point({0.0, 0.0})) == doctest::Approx(p.height));
  CHECK(m.value(point({0.425, 0.0})) == 0.0);
  CHECK(m.value(point({-0.425, 0.0})) == 0.0);
  CHECK(m.value(point({1.0, 0.0})) == doctest::Approx(p.height));
  CHECK(m.value(point({0.0, 0.5})) == 0.0);
  CHECK(m.value(point({0.0, -0.5})) == 0.0);
  // Even in each coordinate.
  for (double x1 : {0.37, 0.52, 0.9})
    for (double x2 : {0.02, 0.12})
      CHECK(m.value(point({x1, x2})) == doctest::Approx(m.value(point({-x1, -x2}))));

  // Derivatives inside the ramps and at smooth interior points.
  for (double x1 : {0.2, 0.37, 0.43, 0.49, 0.6})
    for (double x2 : {0.05, 0.13, -0.12})
      check_derivatives(m, point({x1, x2}), 1e-5);
}

TEST_CASE("slit profile is continuous at the joins") {
  const DoubleSlitParameters p;
  const double joins[] = {p.slit_offset, p.slit_offset + p.buffer,
                          p.slit_offset + p.buffer + p.slit_width,
                          p.slit_offset + 2 * p.buffer + p.slit_width};
  for (double j : joins) {
    const auto lo = slit_profile(j - 1e-12, p);
    const auto hi = slit_profile(j + 1e-12, p);
    CHECK(lo.value == doctest::Approx(hi.value));
    CHECK(std::abs(lo.d1 - hi.d1) < 1e-6);
  }
  const auto b0 = barrier_profile(p.half_thickness + p.buffer - 1e-12, p);
  CHECK(std::abs(b0.value) < 1e-9);
  CHECK_THROWS_AS(PotentialModel::double_slit({10.0, 0.35, 0.1, 0.05, 0.0}), ConfigError);
}

TEST_CASE("custom potential and kind names") {
  const auto m = PotentialModel::custom(
      1, [](const Vec& x) { return std::cos(x(0)); },
      [](const Vec& x) { return Vec::Constant(1, -std::sin(x(0))); },
      [](const Vec& x) { return Mat::Constant(1, 1, -std::cos(x(0))); });
  check_derivatives(m, point({0.4}), 1e-7);
  CHECK(m.kind() == PotentialKind::custom);
  for (auto k : {PotentialKind::harmonic, PotentialKind::double_well, PotentialKind::double_slit})
    CHECK(parse_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_kind("quartic"), ConfigError);
}

TEST_CASE("effective potential adds the bath shift") {
  bath::BathParameters b;
  b.xi = 1.6;
  const auto modes = bath::ohmic_modes(b);
  double expected = 0.0;
  for (std::size_t l = 0; l < modes.omegas.size(); ++l)
    expected += modes.couplings[l] * modes.couplings[l] / (2 * modes.omegas[l] * modes.omegas[l]);
  CHECK(quadratic_shift(modes) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(4.8e-4).epsilon(0.02));

  const auto veff = effective(PotentialModel::double_well(), modes);
  const Vec x = point({0.6});
  CHECK(veff.value(x) == doctest::Approx(-0.36 + 2 * 0.1296 + expected * 0.36));
  CHECK(veff.gradient(x)(0) == doctest::Approx(-1.2 + 8 * 0.216 + 2 * expected * 0.6));
  CHECK(veff.hessian(x)(0, 0) == doctest::Approx(-2 + 24 * 0.36 + 2 * expected));

  b.xi = 0.0;
  CHECK(quadratic_shift(bath::ohmic_modes(b)) == 0.0);
  CHECK_THROWS_AS(EffectivePotential(PotentialModel::harmonic(1), -1.0), ConfigError);
}
