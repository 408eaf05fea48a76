#include <doctest.h>

#include <cmath>

#include "calsim/bath.hpp"

using namespace calsim;
using namespace calsim::bath;

namespace {

BathParameters standard(double xi = 1.6) {
  BathParameters p;
  p.xi = xi;
  return p;
}

}  // namespace

TEST_CASE("ohmic modes follow the inverse-CDF spacing") {
  const auto p = standard();
  const auto m = ohmic_modes(p);
  REQUIRE(m.omegas.size() == 400);
  const double tail = 1.0 - std::exp(-p.omega_max / p.omega_c);
  for (std::size_t l : {1u, 17u, 200u, 399u, 400u}) {
    const double expected = -p.omega_c * std::log(1.0 - static_cast<double>(l) / 400.0 * tail);
    CHECK(m.omegas[l - 1] == doctest::Approx(expected).epsilon(1e-13));
    const double c = p.epsilon * expected * std::sqrt(p.xi * p.omega_c * tail / 400.0);
    CHECK(m.couplings[l - 1] == doctest::Approx(c).epsilon(1e-13));
  }
  CHECK(std::abs(m.omegas.back() - p.omega_max) < 1e-12);
  for (std::size_t l = 1; l < m.omegas.size(); ++l) CHECK(m.omegas[l] > m.omegas[l - 1]);
}

TEST_CASE("zero coupling gives a decoupled bath") {
  const auto m = ohmic_modes(standard(0.0));
  CHECK(m.decoupled());
  for (double c : m.couplings) CHECK(c == 0.0);
  CHECK(correlation_function(m, standard(0.0), 0.3) == complex(0.0, 0.0));
  CHECK_FALSE(ohmic_modes(standard()).decoupled());
}

TEST_CASE("bath parameter validation") {
  auto p = standard();
  p.mode_count = 0;
  CHECK_THROWS_AS(ohmic_modes(p), ConfigError);
  p = standard();
  p.beta = 0.0;
  CHECK_THROWS_AS(ohmic_modes(p), ConfigError);
  p = standard();
  p.xi = -1.0;
  CHECK_THROWS_AS(ohmic_modes(p), ConfigError);
  p = standard();
  p.omega_c = -2.0;
  CHECK_THROWS_AS(ohmic_modes(p), ConfigError);
}

TEST_CASE("coth saturates smoothly") {
  CHECK(coth_saturated(1.0) == doctest::Approx(std::cosh(1.0) / std::sinh(1.0)));
  CHECK(coth_saturated(31.0) == 1.0);
  CHECK(std::abs(coth_saturated(29.9) - 1.0) < 1e-25);
}

TEST_CASE("correlation function at zero and its symmetry") {
  const auto p = standard();
  const auto m = ohmic_modes(p);
  const CorrelationFunction b(m, p);
  double expected = 0.0;
  for (std::size_t l = 0; l < m.omegas.size(); ++l) {
    const double w = m.omegas[l];
    const double c = m.couplings[l];
    expected += c * c / (2.0 * p.epsilon * w) / std::tanh(p.beta * p.epsilon * w / 2.0);
  }
  CHECK(b(0.0).real() == doctest::Approx(expected).epsilon(1e-13));
  CHECK(b(0.0).imag() == 0.0);
  for (double tau : {0.01, 0.37, 1.5}) {
    const complex plus = b(tau);
    const complex minus = b(-tau);
    CHECK(std::abs(minus - std::conj(plus)) < 1e-15 * std::abs(plus) + 1e-18);
  }
}

TEST_CASE("correlation derivative matches central differences") {
  const auto p = standard();
  const CorrelationFunction b(ohmic_modes(p), p);
  const double h = 1e-5;
  for (double tau : {0.0, 0.2, 0.9}) {
    const complex fd = (b(tau + h) - b(tau - h)) / (2.0 * h);
    CHECK(std::abs(fd - b.derivative(tau)) < 1e-6 * (1.0 + std::abs(fd)));
    CHECK(std::abs(b.derivative(tau)) <= b.lipschitz_bound());
  }
}

TEST_CASE("correlation matrix is Hermitian Toeplitz") {
  const auto p = standard();
  const auto m = ohmic_modes(p);
  const CorrelationFunction b(m, p);
  const auto a = correlation_matrix(b, 30, 0.01);
  REQUIRE(a.size() == 31);
  CHECK(a.n_steps() == 30);
  CHECK((a.entries - a.entries.adjoint()).norm() < 1e-16 * a.entries.norm());
  for (int j = 0; j < 31; j += 7)
    for (int k = j; k < 31; k += 5)
      CHECK(std::abs(a.entries(j, k) - b((k - j) * 0.01)) < 1e-15);
  CHECK_THROWS_AS(correlation_matrix(b, 0, 0.01), ConfigError);
  CHECK_THROWS_AS(correlation_matrix(b, 10, 0.0), ConfigError);
}

TEST_CASE("spectral decomposition and truncation") {
  const auto p = standard();
  const auto a = correlation_matrix(ohmic_modes(p), p, 200, 1e-2);
  const auto s = decompose(a);
  CHECK(s.residual < 1e-12 * s.matrix_norm);
  for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i)
    CHECK(std::abs(s.eigenvalues(i)) <= std::abs(s.eigenvalues(i - 1)));
  // Orthonormal eigenvectors.
  const Eigen::MatrixXcd gram = s.eigenvectors.adjoint() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXcd::Identity(201, 201)).norm() < 1e-12);

  double previous = INFINITY;
  for (std::size_t r : {1u, 3u, 8u, 20u, 60u, 201u}) {
    const auto k = truncate(s, r);
    CHECK(k.rank == r);
    CHECK(k.n_steps() == 200);
    const double direct = (k.reconstruct() - a.entries).norm();
    CHECK(std::abs(direct - k.frobenius_error) < 1e-12 * s.matrix_norm);
    CHECK(k.frobenius_error <= previous);
    previous = k.frobenius_error;
  }
  CHECK(truncate(s, 201).frobenius_error == 0.0);
  CHECK_THROWS_AS(truncate(s, 0), ConfigError);
  CHECK_THROWS_AS(truncate(s, 202), ConfigError);
  const auto direct = low_rank_decompose(a, 5);
  CHECK((direct.reconstruct() - truncate(s, 5).reconstruct()).norm() < 1e-12 * s.matrix_norm);
}

TEST_CASE("rank-one kernel reproduces a rank-one matrix") {
  CorrelationMatrix m;
  m.dt = 0.1;
  Eigen::VectorXcd v(4);
  v << complex(1, 0), complex(0, 1), complex(-1, 0.5), complex(0.25, 0);
  m.entries = 3.0 * v * v.adjoint();
  const auto k = low_rank_decompose(m, 1);
  CHECK(k.lambdas(0) == doctest::Approx(3.0 * v.squaredNorm()));
  CHECK((k.reconstruct() - m.entries).norm() < 1e-13);
  CHECK(k.frobenius_error < 1e-13);
}
