#include "calsim/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace calsim::bath {

void BathParameters::validate() const {
  if (mode_count < 1) throw ConfigError("bath.modes: must be >= 1");
  if (!(omega_max > 0.0)) throw ConfigError("bath.omega_max: must be > 0");
  if (!(omega_c > 0.0)) throw ConfigError("bath.omega_c: must be > 0");
  if (!(beta > 0.0)) throw ConfigError("bath.beta: must be > 0");
  if (!(xi >= 0.0)) throw ConfigError("bath.xi: must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("system.epsilon: must be > 0");
}

bool SpectralModes::decoupled() const {
  return std::all_of(couplings.begin(), couplings.end(), [](double c) { return c == 0.0; });
}

SpectralModes ohmic_modes(const BathParameters& params) {
  params.validate();
  const auto L = params.mode_count;
  const double tail = -std::expm1(-params.omega_max / params.omega_c);  // 1 - exp(-w_max / w_c)
  const double scale = std::sqrt(params.xi * params.omega_c / static_cast<double>(L) * tail);

  SpectralModes modes;
  modes.omegas.resize(L);
  modes.couplings.resize(L);
  for (std::size_t l = 1; l <= L; ++l) {
    const double frac = static_cast<double>(l) / static_cast<double>(L);
    const double omega = -params.omega_c * std::log1p(-frac * tail);
    modes.omegas[l - 1] = omega;
    modes.couplings[l - 1] = params.epsilon * omega * scale;
  }
  return modes;
}

double coth_saturated(double x) {
  if (x > 30.0) return 1.0;
  return 1.0 / std::tanh(x);
}

CorrelationFunction::CorrelationFunction(SpectralModes modes, const BathParameters& params)
    : modes_(std::move(modes)) {
  params.validate();
  const auto L = modes_.omegas.size();
  weights_.resize(L);
  coths_.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double w = modes_.omegas[l];
    const double c = modes_.couplings[l];
    weights_[l] = c * c / (2.0 * params.epsilon * w);
    coths_[l] = coth_saturated(params.beta * params.epsilon * w / 2.0);
  }
}

complex CorrelationFunction::operator()(double delta_tau) const {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double phase = modes_.omegas[l] * delta_tau;
    re += weights_[l] * coths_[l] * std::cos(phase);
    im -= weights_[l] * std::sin(phase);
  }
  return {re, im};
}

complex CorrelationFunction::derivative(double delta_tau) const {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double w = modes_.omegas[l];
    re -= weights_[l] * coths_[l] * w * std::sin(w * delta_tau);
    im -= weights_[l] * w * std::cos(w * delta_tau);
  }
  return {re, im};
}

double CorrelationFunction::lipschitz_bound() const {
  double bound = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    bound += std::abs(weights_[l]) * (coths_[l] + 1.0) * modes_.omegas[l];
  return bound;
}

complex correlation_function(const SpectralModes& modes, const BathParameters& params,
                             double delta_tau) {
  return CorrelationFunction(modes, params)(delta_tau);
}

CorrelationMatrix correlation_matrix(const CorrelationFunction& correlation, std::size_t n_steps,
                                     double dt) {
  if (n_steps == 0) throw ConfigError("correlation matrix: n_steps must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("correlation matrix: dt must be > 0");

  const auto n = static_cast<Eigen::Index>(n_steps + 1);
  // Toeplitz: one evaluation per lag.
  std::vector<complex> lags(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) lags[static_cast<std::size_t>(l)] = correlation(l * dt);
  lags[0] = {lags[0].real(), 0.0};

  CorrelationMatrix matrix;
  matrix.dt = dt;
  matrix.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto lag = static_cast<std::size_t>(std::abs(k - j));
      matrix.entries(j, k) = k >= j ? lags[lag] : std::conj(lags[lag]);
    }
  }
  return matrix;
}

CorrelationMatrix correlation_matrix(const SpectralModes& modes, const BathParameters& params,
                                     std::size_t n_steps, double dt) {
  return correlation_matrix(CorrelationFunction(modes, params), n_steps, dt);
}

SpectralDecomposition decompose(const CorrelationMatrix& matrix) {
  const auto& a = matrix.entries;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success)
    throw NumericError("correlation matrix eigendecomposition did not converge");

  const Eigen::VectorXd& values = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(values(x)) > std::abs(values(y));
  });

  SpectralDecomposition out;
  out.dt = matrix.dt;
  out.eigenvalues.resize(values.size());
  out.eigenvectors.resize(a.rows(), a.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.eigenvalues(idx) = values(order[i]);
    out.eigenvectors.col(idx) = solver.eigenvectors().col(order[i]);
  }
  out.matrix_norm = a.norm();
  out.residual =
      (a * out.eigenvectors - out.eigenvectors * out.eigenvalues.asDiagonal()).norm();
  if (out.residual > 1e-10 * out.matrix_norm)
    throw NumericError("correlation matrix eigendecomposition residual " +
                       std::to_string(out.residual) + " exceeds 1e-10 * ||B||_F");
  return out;
}

LowRankKernel truncate(const SpectralDecomposition& spectrum, std::size_t rank) {
  const auto n = static_cast<std::size_t>(spectrum.eigenvalues.size());
  if (rank < 1 || rank > n)
    throw ConfigError("dyson.rank: must lie in [1, " + std::to_string(n) + "]");

  const auto r = static_cast<Eigen::Index>(rank);
  LowRankKernel kernel;
  kernel.rank = rank;
  kernel.dt = spectrum.dt;
  kernel.lambdas = spectrum.eigenvalues.head(r);
  kernel.vectors = spectrum.eigenvectors.leftCols(r);
  kernel.frobenius_error = spectrum.eigenvalues.tail(static_cast<Eigen::Index>(n) - r).norm();
  return kernel;
}

LowRankKernel low_rank_decompose(const CorrelationMatrix& matrix, std::size_t rank) {
  if (rank < 1 || rank > matrix.size())
    throw ConfigError("dyson.rank: must lie in [1, " + std::to_string(matrix.size()) + "]");
  return truncate(decompose(matrix), rank);
}

Eigen::MatrixXcd LowRankKernel::reconstruct() const {
  return vectors * lambdas.asDiagonal() * vectors.adjoint();
}

}  // namespace calsim::bath
