// bath.hpp — Ohmic harmonic bath, its two-point correlation function and the
// truncated spectral decomposition of the discrete correlation matrix.

#pragma once

#include <cstddef>
#include <vector>

#include "calsim/types.hpp"

namespace calsim::bath {

struct BathParameters {
  std::size_t mode_count{400};  // L
  double omega_max{10.0};
  double omega_c{2.5};          // cutoff frequency
  double beta{5.0};             // inverse temperature
  double xi{0.0};               // coupling strength
  double epsilon{1.0 / 64.0};   // semiclassical parameter

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SpectralModes {
  std::vector<double> omegas;
  std::vector<double> couplings;

  bool decoupled() const;  // every coupling is exactly zero
};

SpectralModes ohmic_modes(const BathParameters& params);

/// coth(x) for x > 0, saturating to 1 once the correction drops below 1e-26.
double coth_saturated(double x);

/// The stationary correlation B(t1, t2) = B~(t1 - t2) of the bath.
class CorrelationFunction {
 public:
  CorrelationFunction(SpectralModes modes, const BathParameters& params);

  complex operator()(double delta_tau) const;
  complex derivative(double delta_tau) const;

  /// Sum over modes of |weight| * (coth + 1) * omega; a Lipschitz bound of B~.
  double lipschitz_bound() const;

  const SpectralModes& modes() const { return modes_; }

 private:
  SpectralModes modes_;
  std::vector<double> weights_;  // c_l^2 / (2 eps w_l)
  std::vector<double> coths_;    // coth(beta eps w_l / 2)
};

complex correlation_function(const SpectralModes& modes, const BathParameters& params,
                             double delta_tau);

/// entries(j, k) = B(k dt, j dt) = B~((k - j) dt) for 0 <= j, k <= n_steps.
struct CorrelationMatrix {
  double dt{0.0};
  Eigen::MatrixXcd entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t n_steps() const { return size() - 1; }
};

CorrelationMatrix correlation_matrix(const CorrelationFunction& correlation, std::size_t n_steps,
                                     double dt);
CorrelationMatrix correlation_matrix(const SpectralModes& modes, const BathParameters& params,
                                     std::size_t n_steps, double dt);

/// Full Hermitian eigendecomposition with pairs ordered by descending |lambda|.
struct SpectralDecomposition {
  double dt{0.0};
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns
  double matrix_norm{0.0};        // Frobenius norm of the decomposed matrix
  double residual{0.0};           // ||A V - V diag(lambda)||_F
};

SpectralDecomposition decompose(const CorrelationMatrix& matrix);

/// b_jk ~= sum_m lambda_m conj(V_m(k dt)) V_m(j dt), with V_m(i dt) = vectors(i, m).
struct LowRankKernel {
  std::size_t rank{0};
  Eigen::VectorXd lambdas;
  Eigen::MatrixXcd vectors;  // (n_steps + 1) x rank
  double dt{0.0};
  double frobenius_error{0.0};

  std::size_t n_steps() const { return static_cast<std::size_t>(vectors.rows()) - 1; }
  Eigen::MatrixXcd reconstruct() const;
};

LowRankKernel truncate(const SpectralDecomposition& spectrum, std::size_t rank);
LowRankKernel low_rank_decompose(const CorrelationMatrix& matrix, std::size_t rank);

}  // namespace calsim::bath
