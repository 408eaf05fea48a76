#include <doctest.h>

#include <cmath>
#include <numbers>

#include "calsim/fga.hpp"
#include "calsim/oracle.hpp"

using namespace calsim;
using namespace calsim::fga;

namespace {

potentials::EffectivePotential plain(const potentials::PotentialModel& m) {
  return potentials::EffectivePotential(m, 0.0);
}

potentials::PotentialModel free_particle() {
  return potentials::PotentialModel::custom(
      1, [](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec::Zero(x.size()); },
      [](const Vec& x) { return Mat::Zero(x.size(), x.size()); });
}

QuadraturePoint at(double p, double q) {
  QuadraturePoint pt;
  pt.p = Vec::Constant(1, p);
  pt.q = Vec::Constant(1, q);
  pt.weight = 1.0;
  return pt;
}

// Sum of weighted psi_k over a full phase-space grid.
std::vector<complex> propagate(const InitialWavefunction& psi0,
                               const potentials::EffectivePotential& v, const PhaseSpaceGrid& pq,
                               const SpatialGrid& grid, std::size_t steps, double dt) {
  std::vector<complex> psi(grid.x_size());
  for (std::size_t k = 0; k < pq.size(); ++k) {
    const auto pt = pq.point(k);
    const auto h = evolve(pt, v, steps, dt);
    const auto f = evaluate_psi_k(h, psi0, grid, pt);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += pt.weight * f[i];
  }
  return psi;
}

}  // namespace

TEST_CASE("axis grids") {
  AxisGrid a{-2.0, 2.0, 0.25};
  CHECK(a.count() == 17);
  CHECK(a[16] == 2.0);
  CHECK_NOTHROW(a.validate("a"));
  CHECK_THROWS_AS((AxisGrid{0.0, 1.0, 0.3}).validate("b"), ConfigError);
  CHECK_THROWS_AS((AxisGrid{1.0, 0.0, 0.5}).validate("c"), ConfigError);
  CHECK_THROWS_AS((AxisGrid{0.0, 1.0, 0.0}).validate("d"), ConfigError);
  CHECK((AxisGrid{0.5, 0.5, 0.1}).count() == 1);
}

TEST_CASE("phase-space grid ordering and weight") {
  const auto g = make_phase_space_grid({{-1, 1}, {0, 1}}, {{-2, 2}, {3, 4}}, 0.5, 0.5);
  // p1: 5, p2: 3, q1: 9, q2: 3
  CHECK(g.size() == 5 * 3 * 9 * 3);
  CHECK(g.weight() == doctest::Approx(0.0625));
  const auto first = g.point(0);
  CHECK(first.p(0) == -1.0);
  CHECK(first.q(1) == 3.0);
  // Last q axis is the fastest.
  CHECK(g.point(1).q(1) == 3.5);
  CHECK(g.point(3).q(1) == 3.0);
  CHECK(g.point(3).q(0) == -1.5);
  const auto last = g.point(g.size() - 1);
  CHECK(last.p(0) == 1.0);
  CHECK(last.p(1) == 1.0);
  CHECK(last.q(0) == 2.0);
  CHECK(last.q(1) == 4.0);
  // Indices round-trip through point().
  for (std::size_t k : {0ul, 7ul, 123ul, 404ul}) {
    const auto pt = g.point(k);
    for (int d = 0; d < 2; ++d) {
      const auto [ip, iq] = g.axis_indices(k, d);
      CHECK(g.p_axes[d][ip] == pt.p(d));
      CHECK(g.q_axes[d][iq] == pt.q(d));
    }
  }
  CHECK(build_grid(g).size() == g.size());
  CHECK_THROWS_AS(make_phase_space_grid({{0, 1}}, {}, 0.5, 0.5), ConfigError);
  CHECK_THROWS_AS(make_phase_space_grid({{0, 1}}, {{0, 0.7}}, 0.5, 0.5), ConfigError);
}

TEST_CASE("default y grid covers the q grid") {
  const double eps = 1.0 / 64.0;
  const AxisGrid q{-2.0, 2.0, 1.0 / 32.0};
  const auto y = default_y_axis(q, eps);
  CHECK(y.step == doctest::Approx(1.0 / 32.0));
  CHECK(y.min + y.max == doctest::Approx(0.0));
  CHECK(y.max >= 2.0 + 6.0 * std::sqrt(eps) - 1e-12);
  CHECK_NOTHROW(y.validate("y"));
  const auto coarse = default_y_axis(AxisGrid{7.0, 9.0, 0.25}, eps);
  CHECK(coarse.step == doctest::Approx(std::sqrt(eps) / 4.0));
  CHECK(0.5 * (coarse.min + coarse.max) == doctest::Approx(8.0));
}

TEST_CASE("initial state and singular Z") {
  const auto s = TrajectoryState::initial(Vec::Constant(2, 0.3), Vec::Constant(2, -0.1));
  CHECK(std::abs(s.a - 2.0) < 1e-15);
  CHECK((s.Z() - 2.0 * CMat::Identity(2, 2)).norm() < 1e-15);

  auto bad = TrajectoryState::initial(Vec::Zero(1), Vec::Zero(1));
  bad.dzP(0, 0) = complex(0.0, 1.0);  // Z = dzQ + i dzP = 0
  CHECK_THROWS_AS(rhs(bad, plain(potentials::PotentialModel::harmonic(1))), SingularTrajectory);
  CHECK_THROWS_AS(rhs(bad, plain(potentials::PotentialModel::harmonic(1))), NumericError);
}

TEST_CASE("harmonic trajectory closed form") {
  const auto v = plain(potentials::PotentialModel::harmonic(1));
  const double p0 = 0.7, q0 = -0.4, t = 2.0;
  const auto h = evolve(at(p0, q0), v, 2000, 1e-3);
  CHECK(h.n_steps() == 2000);
  CHECK(h.final.Q(0) == doctest::Approx(q0 * std::cos(t) + p0 * std::sin(t)).epsilon(1e-12));
  CHECK(h.final.P(0) == doctest::Approx(p0 * std::cos(t) - q0 * std::sin(t)).epsilon(1e-12));
  const double s = 0.5 * (p0 * p0 - q0 * q0) * std::sin(2 * t) / 2 - p0 * q0 * std::sin(t) * std::sin(t);
  CHECK(h.final.S == doctest::Approx(s).epsilon(1e-11));
  // Z = 2 e^{-it} and a = sqrt(2) e^{-it/2}.
  CHECK(std::abs(h.final.Z()(0, 0) - 2.0 * std::polar(1.0, -t)) < 1e-12);
  CHECK(std::abs(h.final.a - std::sqrt(2.0) * std::polar(1.0, -t / 2)) < 1e-12);
  CHECK(h.q_samples(1000, 0) == doctest::Approx(q0 * std::cos(1.0) + p0 * std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("free particle trajectory") {
  const auto v = plain(free_particle());
  const auto h = evolve(at(1.5, 0.2), v, 100, 0.01);
  CHECK(h.final.Q(0) == doctest::Approx(1.7));
  CHECK(h.final.P(0) == 1.5);
  CHECK(h.final.S == doctest::Approx(1.125));
  // Z = 2 - i t, a = sqrt(2) (1 - i t/2)^{1/2}.
  CHECK(std::abs(h.final.Z()(0, 0) - complex(2.0, -1.0)) < 1e-12);
  CHECK(std::abs(h.final.a - std::sqrt(2.0) * std::sqrt(complex(1.0, -0.5))) < 1e-11);
}

TEST_CASE("RK4 converges at fourth order on the double well") {
  const auto v = plain(potentials::PotentialModel::double_well());
  auto final_q = [&](std::size_t n) { return evolve(at(0.4, 0.3), v, n, 1.0 / n).final; };
  const auto a = final_q(200), b = final_q(400), c = final_q(800);
  const double e1 = std::abs(a.Q(0) - b.Q(0));
  const double e2 = std::abs(b.Q(0) - c.Q(0));
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
  const double s1 = std::abs(a.a - b.a), s2 = std::abs(b.a - c.a);
  CHECK(s1 / s2 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("energy is conserved along trajectories") {
  const auto v = plain(potentials::PotentialModel::double_well());
  const auto start = TrajectoryState::initial(Vec::Constant(1, 0.5), Vec::Constant(1, -0.8));
  const double e0 = classical_energy(start, v);
  const auto h = evolve(at(0.5, -0.8), v, 3000, 1e-3);
  CHECK(std::abs(classical_energy(h.final, v) - e0) < 1e-9 * std::abs(e0));
}

TEST_CASE("dimension mismatches are rejected") {
  QuadraturePoint pt;
  pt.p = Vec::Zero(2);
  pt.q = Vec::Zero(2);
  CHECK_THROWS_AS(evolve(pt, plain(potentials::PotentialModel::harmonic(1)), 10, 0.1),
                  std::invalid_argument);
}

TEST_CASE("FBI overlap of the standard Gaussian") {
  const double eps = 1.0 / 64.0;
  const auto psi = InitialWavefunction::gaussian(eps);
  const AxisGrid y{-3.0, 3.0, 1.0 / 128.0};
  for (auto [p, q] : {std::pair{0.0, 0.0}, {0.3, -0.2}, {-1.0, 0.5}}) {
    const complex got = fbi_axis_overlap(psi.factors()[0], p, q, y, eps);
    const complex expected = std::sqrt(std::numbers::pi * eps) *
                             std::exp(complex(-(q * q + p * p) / (4 * eps), p * q / (2 * eps)));
    CHECK(std::abs(got - expected) < 1e-12);
    Vec pv = Vec::Constant(1, p), qv = Vec::Constant(1, q);
    CHECK(std::abs(fbi_overlap(psi, pv, qv, {y}) - psi.prefactor() * expected) < 1e-12);
  }
}

TEST_CASE("window helpers") {
  const double eps = 1.0 / 64.0;
  const double r = window_radius(eps, 1e-16);
  CHECK(std::exp(-r * r / (2 * eps)) == doctest::Approx(1e-16));
  CHECK(std::isinf(window_radius(eps, 0.0)));
  const AxisGrid x{-2.0, 2.0, 1.0 / 64.0};
  const auto w = axis_window(x, 0.5, 0.25, eps, 1e-16);
  CHECK(x[w.begin] >= 0.25 - r - 1e-12);
  CHECK(x[w.begin + w.size() - 1] <= 0.25 + r + 1e-12);
  CHECK(x[w.begin - 1] < 0.25 - r);
  const std::size_t mid = static_cast<std::size_t>(std::llround((0.25 - x.min) / x.step)) - w.begin;
  CHECK(w.re[mid] == doctest::Approx(1.0));
  CHECK(std::abs(w.im[mid]) < 1e-12);
  CHECK(axis_window(x, 0.0, 10.0, eps, 1e-16).size() == 0);
  CHECK(axis_window(x, 0.0, 10.0, eps, 0.0).size() == x.count());

  const std::vector<AxisGrid> ys{{-2.0, 2.0, 0.1}};
  CHECK(window_mass_outside(Vec::Constant(1, 0.0), ys, eps) < 1e-50);
  CHECK(window_mass_outside(Vec::Constant(1, 2.0), ys, eps) == doctest::Approx(0.5));
}

TEST_CASE("packet factors match the dense evaluation") {
  const double eps = 1.0 / 32.0;
  const auto psi0 = InitialWavefunction::gaussian(eps, 0.1, 0.2);
  const auto v = plain(potentials::PotentialModel::double_well());
  const auto pt = at(0.3, 0.2);
  const auto h = evolve(pt, v, 200, 0.005);
  SpatialGrid grid{{{-2.0, 2.0, 1.0 / 32.0}}, {{-3.0, 3.0, 1.0 / 64.0}}};
  const auto full = evaluate_psi_k(h, psi0, grid, pt, 0.0);
  const auto cut = evaluate_psi_k(h, psi0, grid, pt, 1e-16);
  double peak = 0.0, gap = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    peak = std::max(peak, std::abs(full[i]));
    gap = std::max(gap, std::abs(full[i] - cut[i]));
  }
  CHECK(gap <= 1e-15 * peak);

  // Coefficient formula at one grid point.
  const complex overlap = fbi_overlap(psi0, pt.p, pt.q, grid.y_axes);
  const double x = grid.x_axes[0][70];
  const double u = x - h.final.Q(0);
  const complex expected = std::pow(2 * std::numbers::pi * eps, -1.5) * h.final.a *
                           std::polar(1.0, h.final.S / eps) * overlap *
                           std::exp(complex(-u * u / (2 * eps), h.final.P(0) * u / eps));
  CHECK(std::abs(full[70] - expected) < 1e-12 * std::abs(expected) + 1e-300);
}

TEST_CASE("frozen Gaussians are exact for the harmonic oscillator") {
  const double eps = 1.0 / 16.0;
  const auto psi0 = InitialWavefunction::gaussian(eps);
  const auto v = plain(potentials::PotentialModel::harmonic(1));
  const auto pq = make_phase_space_grid({{-2.5, 2.5}}, {{-2.5, 2.5}}, 1.0 / 16.0, 1.0 / 16.0);
  SpatialGrid grid{{{-1.5, 1.5, 1.0 / 16.0}}, {default_y_axis(pq.q_axes[0], eps)}};
  const auto psi = propagate(psi0, v, pq, grid, 1000, 1e-3);

  std::vector<double> xs;
  for (std::size_t i = 0; i < grid.x_axes[0].count(); ++i) xs.push_back(grid.x_axes[0][i]);
  const auto exact = oracle::exact_quadratic_evolution({}, 1.0, 1.0, eps, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(psi[i] - exact[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("frozen Gaussians are exact for a free boosted packet") {
  const double eps = 1.0 / 16.0;
  const auto psi0 = InitialWavefunction::gaussian(eps, -0.3, 0.5);
  const auto v = plain(free_particle());
  const auto pq = make_phase_space_grid({{-2.0, 3.0}}, {{-3.0, 2.5}}, 1.0 / 16.0, 1.0 / 16.0);
  SpatialGrid grid{{{-1.5, 1.5, 1.0 / 16.0}}, {default_y_axis(pq.q_axes[0], eps)}};
  const auto psi = propagate(psi0, v, pq, grid, 100, 1e-2);

  std::vector<double> xs;
  for (std::size_t i = 0; i < grid.x_axes[0].count(); ++i) xs.push_back(grid.x_axes[0][i]);
  oracle::GaussianSpec spec{-0.3, 0.5, complex(0.0, 1.0)};
  const auto exact = oracle::exact_quadratic_evolution(spec, 0.0, 1.0, eps, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(std::norm(psi[i]) - std::norm(exact[i])));
  CHECK(worst < 1e-6);
}
