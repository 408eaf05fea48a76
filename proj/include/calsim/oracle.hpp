// oracle.hpp — brute-force reference implementations. Nothing here shares code with the
// production quadrature paths.

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "calsim/types.hpp"

namespace calsim::oracle {

/// Pairs (i, j) with i < j, 1-based, covering {1..m}.
struct Pairing {
  std::vector<std::pair<int, int>> pairs;
  bool operator==(const Pairing&) const = default;
};

/// Every perfect matching of {1..m}. Throws std::invalid_argument unless m is even and <= 10.
std::vector<Pairing> wick_pairings(int m);

/// (m - 1)!! for even m >= 0.
std::size_t double_factorial_odd(int m);

/// sum over pairings of prod pair_value(i, j), with 1-based i < j.
complex pairing_sum(int m, const std::function<complex(int, int)>& pair_value);

/// sum_P prod_{(i,j) in P} B(tau_j, tau_i) for ordered times tau (|tau| even, <= 8).
complex brute_L_same(const std::vector<double>& tau,
                     const std::function<complex(double, double)>& B);

/// Same value via L(tau) = sum_k B(tau_k, tau_1) L(tau without {tau_1, tau_k}).
complex recursive_L_same(const std::vector<double>& tau,
                         const std::function<complex(double, double)>& B);

using IndexIntegrand = std::function<complex(const std::vector<std::size_t>&)>;
using TimeIntegrand = std::function<complex(const std::vector<double>&)>;

/// Sum over grid tuples i_1 <= ... <= i_n of prod w_{i_l} / prod mu! (mu: multiplicities of
/// tied indices) times f(i). On a grid it equals the ordered-simplex integral of the
/// symmetric extension of f.
complex simplex_grid_sum(int n, const std::vector<double>& weights, const IndexIntegrand& f);

/// Trapezoid-in-each-variable simplex quadrature over 0 <= s_1 <= ... <= s_n <= t with
/// `subdivisions` intervals, built on simplex_grid_sum. Requires n <= 4.
complex brute_simplex_integral(const TimeIntegrand& f, int n, double t, std::size_t subdivisions);

/// Nested Gauss-Legendre (20 points per level) over the ordered simplex. Requires n <= 4.
complex gauss_simplex_integral(const TimeIntegrand& f, int n, double t);

struct MonteCarloEstimate {
  complex value;
  double standard_error;  // of |value|, combining real and imaginary parts
};

/// Uniform sampling of the ordered simplex (sorted uniforms).
MonteCarloEstimate monte_carlo_simplex(const TimeIntegrand& f, int n, double t,
                                       std::size_t samples, std::uint64_t seed);

/// Normalised 1-D packet exp(i/eps [alpha/2 (x-q)^2 + p x]) with Im alpha > 0.
/// alpha = i with p = q = 0 is the standard ground-state Gaussian.
struct GaussianSpec {
  double q{0.0};
  double p{0.0};
  complex alpha{0.0, 1.0};
};

/// Closed-form evolution under V = omega^2 x^2 / 2 (omega = 0 is the free particle),
/// evaluated at the points x.
std::vector<complex> exact_quadratic_evolution(const GaussianSpec& spec, double omega, double t,
                                               double epsilon, const std::vector<double>& x);

/// Exact density on a D-dimensional tensor grid (row-major, last axis fastest) for a product
/// of identical Gaussians per axis.
std::vector<double> exact_quadratic_density(const std::vector<GaussianSpec>& axes, double omega,
                                            double t, double epsilon,
                                            const std::vector<std::vector<double>>& x_axes);

struct JacobiResult {
  Eigen::VectorXd eigenvalues;  // descending |lambda|
  Eigen::MatrixXcd eigenvectors;
  int sweeps{0};
};

/// Cyclic complex Jacobi for a Hermitian matrix.
JacobiResult jacobi_eigensolver(const Eigen::MatrixXcd& matrix, double tolerance = 1e-14,
                                int max_sweeps = 100);

/// B~(0) by compensated (Neumaier) summation in long double.
complex correlation_at_zero_extended(const std::vector<double>& omegas,
                                     const std::vector<double>& couplings, double beta,
                                     double epsilon);

}  // namespace calsim::oracle
