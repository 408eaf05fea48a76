#include "calsim/wavefunction.hpp"

#include <cmath>
#include <numbers>

namespace calsim {

complex AxisFactor::operator()(double x, double epsilon) const {
  double envelope = 0.0;
  for (const auto& t : terms) {
    const double u = x - t.center;
    envelope += t.coefficient * std::exp(-u * u / t.spread);
  }
  if (momentum == 0.0) return {envelope, 0.0};
  return envelope * std::polar(1.0, momentum * x / epsilon);
}

double AxisFactor::norm_squared() const {
  // int exp(-(x-a)^2/s - (x-b)^2/u) dx = sqrt(pi s u/(s+u)) exp(-(a-b)^2/(s+u))
  double total = 0.0;
  for (const auto& ti : terms) {
    for (const auto& tj : terms) {
      const double s = ti.spread;
      const double u = tj.spread;
      const double d = ti.center - tj.center;
      total += ti.coefficient * tj.coefficient * std::sqrt(std::numbers::pi * s * u / (s + u)) *
               std::exp(-d * d / (s + u));
    }
  }
  return total;
}

InitialWavefunction InitialWavefunction::double_well_pair(double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("system.epsilon: must be > 0");
  InitialWavefunction psi;
  psi.kind_ = "double_well_pair";
  psi.epsilon_ = epsilon;
  psi.factors_.push_back(AxisFactor{{{1.0, 0.5, 4.0 * epsilon}, {0.8, -0.5, 4.0 * epsilon}}, 0.0});
  psi.prefactor_ = 5.0 / std::sqrt(41.0 + 40.0 * std::exp(-1.0 / (8.0 * epsilon))) *
                   std::pow(2.0 * std::numbers::pi * epsilon, -0.25);
  return psi;
}

InitialWavefunction InitialWavefunction::gaussian(double epsilon, double center, double momentum) {
  if (!(epsilon > 0.0)) throw ConfigError("system.epsilon: must be > 0");
  InitialWavefunction psi;
  psi.kind_ = "gaussian";
  psi.epsilon_ = epsilon;
  psi.factors_.push_back(AxisFactor{{{1.0, center, 2.0 * epsilon}}, momentum});
  psi.prefactor_ = std::pow(std::numbers::pi * epsilon, -0.25);
  return psi;
}

InitialWavefunction InitialWavefunction::product(const std::vector<InitialWavefunction>& axes) {
  if (axes.empty()) throw ConfigError("system.initial: product needs at least one factor");
  InitialWavefunction psi;
  psi.kind_ = "product";
  psi.epsilon_ = axes.front().epsilon_;
  for (const auto& a : axes) {
    if (a.epsilon_ != psi.epsilon_)
      throw ConfigError("system.initial: product factors must share epsilon");
    psi.kind_ += (psi.factors_.empty() ? ":" : ",") + a.kind_;
    psi.prefactor_ *= a.prefactor_;
    psi.factors_.insert(psi.factors_.end(), a.factors_.begin(), a.factors_.end());
  }
  if (psi.dimension() > kMaxDimension) throw ConfigError("system.initial: too many axes");
  return psi;
}

InitialWavefunction InitialWavefunction::double_slit(double epsilon, double q1, double q2,
                                                     double p1, double p2) {
  if (!(epsilon > 0.0)) throw ConfigError("system.epsilon: must be > 0");
  InitialWavefunction psi;
  psi.kind_ = "double_slit";
  psi.epsilon_ = epsilon;
  const double s = 8.0 * epsilon;
  psi.factors_.push_back(AxisFactor{{{1.0, q1, s}, {1.0, -q1, s}}, p1});
  psi.factors_.push_back(AxisFactor{{{1.0, q2, s}}, p2});
  psi.prefactor_ =
      1.0 / std::sqrt(8.0 * std::numbers::pi * epsilon * (1.0 + std::exp(-q1 * q1 / (4.0 * epsilon))));
  return psi;
}

complex InitialWavefunction::operator()(const Vec& y) const {
  complex value = prefactor_;
  for (int d = 0; d < dimension(); ++d) value *= axis_value(d, y(d));
  return value;
}

double InitialWavefunction::analytic_norm() const {
  double n2 = prefactor_ * prefactor_;
  for (const auto& f : factors_) n2 *= f.norm_squared();
  return std::sqrt(n2);
}

}  // namespace calsim
