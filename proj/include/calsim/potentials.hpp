// potentials.hpp — system potentials V, their derivatives, and the
// bath-renormalised effective potential used by the trajectory dynamics.

#pragma once

#include <functional>
#include <string>

#include "calsim/bath.hpp"
#include "calsim/types.hpp"

namespace calsim::potentials {

enum class PotentialKind { harmonic, double_well, double_slit, custom };

std::string to_string(PotentialKind kind);
PotentialKind parse_kind(const std::string& name);

/// Geometry of the two-slit barrier; distances measured from the barrier centre.
struct DoubleSlitParameters {
  double height{10.0};   // h
  double slit_offset{0.35};    // d1, distance from the centre to a slit
  double half_thickness{0.1};  // d2, distance from the centre to the barrier edge
  double slit_width{0.05};     // w
  double buffer{0.05};         // b, width of the smooth ramp
};

/// Quintic with f(0)=0, f(1)=1 and vanishing first/second derivatives at both ends.
/// Throws std::domain_error outside [0, 1].
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);

/// Profile across the slits (1 on the barrier, 0 inside a slit) and its derivatives.
struct Profile {
  double value;
  double d1;
  double d2;
};
Profile slit_profile(double x, const DoubleSlitParameters& p);
Profile barrier_profile(double x, const DoubleSlitParameters& p);

class PotentialModel {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  static PotentialModel harmonic(int dimension);
  static PotentialModel double_well();
  static PotentialModel double_slit(const DoubleSlitParameters& params = {});
  static PotentialModel custom(int dimension, ValueFn value, GradientFn gradient,
                               HessianFn hessian);

  PotentialKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const DoubleSlitParameters& slit_parameters() const { return slit_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

 private:
  PotentialModel(PotentialKind kind, int dimension) : kind_(kind), dimension_(dimension) {}
  void check(const Vec& x) const;

  PotentialKind kind_;
  int dimension_;
  DoubleSlitParameters slit_;
  ValueFn value_fn_;
  GradientFn gradient_fn_;
  HessianFn hessian_fn_;
};

/// V~(x) = V(x) + shift * |x|^2 with shift = sum_l c_l^2 / (2 w_l^2).
class EffectivePotential {
 public:
  EffectivePotential(PotentialModel base, double quadratic_shift);

  const PotentialModel& base() const { return base_; }
  double quadratic_shift() const { return shift_; }
  int dimension() const { return base_.dimension(); }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

 private:
  PotentialModel base_;
  double shift_;
};

double quadratic_shift(const bath::SpectralModes& modes);
EffectivePotential effective(const PotentialModel& model, const bath::SpectralModes& modes);

}  // namespace calsim::potentials
