// wavefunction.hpp — initial system wavefunctions built from Gaussian sums.

#pragma once

#include <string>
#include <vector>

#include "calsim/types.hpp"

namespace calsim {

/// coefficient * exp(-(x - center)^2 / spread)
struct GaussianTerm {
  double coefficient{1.0};
  double center{0.0};
  double spread{1.0};
};

/// One-dimensional factor: a real Gaussian sum times the plane wave exp(i momentum x / eps).
struct AxisFactor {
  std::vector<GaussianTerm> terms;
  double momentum{0.0};

  complex operator()(double x, double epsilon) const;
  /// Closed-form integral of |factor|^2 over the real line.
  double norm_squared() const;
};

class InitialWavefunction {
 public:
  /// psi_1: two packets at +-1/2, relative weight 4/5, with its closed-form normalisation.
  static InitialWavefunction double_well_pair(double epsilon);
  /// psi_2 generalised to a shifted, boosted packet: (pi eps)^(-1/4) exp(-(x-c)^2/(2 eps) + i p x/eps).
  static InitialWavefunction gaussian(double epsilon, double center = 0.0, double momentum = 0.0);
  /// Tensor product of one-dimensional wavefunctions, one per axis.
  static InitialWavefunction product(const std::vector<InitialWavefunction>& axes);
  /// Two-slit source packet: Gaussians at (+-q1, q2) with momentum (p1, p2).
  static InitialWavefunction double_slit(double epsilon, double q1, double q2, double p1,
                                         double p2);

  const std::string& kind() const { return kind_; }
  int dimension() const { return static_cast<int>(factors_.size()); }
  double epsilon() const { return epsilon_; }
  double prefactor() const { return prefactor_; }
  const std::vector<AxisFactor>& factors() const { return factors_; }

  complex operator()(const Vec& y) const;
  /// Value of the per-axis factor (without the global prefactor).
  complex axis_value(int axis, double y) const { return factors_[static_cast<std::size_t>(axis)](y, epsilon_); }
  /// Exact L2 norm from the Gaussian-sum closed form.
  double analytic_norm() const;

 private:
  std::string kind_;
  double epsilon_{0.0};
  double prefactor_{1.0};
  std::vector<AxisFactor> factors_;
};

}  // namespace calsim
