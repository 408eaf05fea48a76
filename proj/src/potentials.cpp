#include "calsim/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace calsim::potentials {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::double_well: return "double_well";
    case PotentialKind::double_slit: return "double_slit";
    case PotentialKind::custom: return "custom";
  }
  return "unknown";
}

PotentialKind parse_kind(const std::string& name) {
  if (name == "harmonic") return PotentialKind::harmonic;
  if (name == "double_well") return PotentialKind::double_well;
  if (name == "double_slit") return PotentialKind::double_slit;
  throw ConfigError("system.potential: unknown kind '" + name + "'");
}

double smoothstep(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("smoothstep: argument outside [0, 1]");
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_d1(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("smoothstep: argument outside [0, 1]");
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

double smoothstep_d2(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("smoothstep: argument outside [0, 1]");
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

namespace {

// Profile as a function of a = |x|; the caller restores the sign of d1.
Profile ramp_down(double a, double start, double width) {
  const double u = (start + width - a) / width;
  return {smoothstep(u), -smoothstep_d1(u) / width, smoothstep_d2(u) / (width * width)};
}

Profile ramp_up(double a, double start, double width) {
  const double u = (a - start) / width;
  return {smoothstep(u), smoothstep_d1(u) / width, smoothstep_d2(u) / (width * width)};
}

Profile with_sign(Profile p, double x) {
  if (x < 0.0) p.d1 = -p.d1;
  return p;
}

}  // namespace

Profile slit_profile(double x, const DoubleSlitParameters& p) {
  const double a = std::abs(x);
  const double d = p.slit_offset;
  const double b = p.buffer;
  const double w = p.slit_width;
  if (a < d) return {1.0, 0.0, 0.0};
  if (a < d + b) return with_sign(ramp_down(a, d, b), x);
  if (a < d + b + w) return {0.0, 0.0, 0.0};
  if (a < d + 2.0 * b + w) return with_sign(ramp_up(a, d + b + w, b), x);
  return {1.0, 0.0, 0.0};
}

Profile barrier_profile(double x, const DoubleSlitParameters& p) {
  const double a = std::abs(x);
  if (a < p.half_thickness) return {1.0, 0.0, 0.0};
  if (a < p.half_thickness + p.buffer) return with_sign(ramp_down(a, p.half_thickness, p.buffer), x);
  return {0.0, 0.0, 0.0};
}

PotentialModel PotentialModel::harmonic(int dimension) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw ConfigError("system.dimension: must lie in [1, 3]");
  return PotentialModel(PotentialKind::harmonic, dimension);
}

PotentialModel PotentialModel::double_well() {
  return PotentialModel(PotentialKind::double_well, 1);
}

PotentialModel PotentialModel::double_slit(const DoubleSlitParameters& params) {
  if (!(params.buffer > 0.0)) throw ConfigError("system.slit_buffer: must be > 0");
  if (!(params.slit_width >= 0.0) || !(params.slit_offset >= 0.0) ||
      !(params.half_thickness >= 0.0))
    throw ConfigError("system: double-slit distances must be non-negative");
  PotentialModel model(PotentialKind::double_slit, 2);
  model.slit_ = params;
  return model;
}

PotentialModel PotentialModel::custom(int dimension, ValueFn value, GradientFn gradient,
                                      HessianFn hessian) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw ConfigError("custom potential: dimension must lie in [1, 3]");
  PotentialModel model(PotentialKind::custom, dimension);
  model.value_fn_ = std::move(value);
  model.gradient_fn_ = std::move(gradient);
  model.hessian_fn_ = std::move(hessian);
  return model;
}

void PotentialModel::check(const Vec& x) const {
  if (x.size() != dimension_)
    throw std::invalid_argument("potential: position has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dimension_));
}

double PotentialModel::value(const Vec& x) const {
  check(x);
  switch (kind_) {
    case PotentialKind::harmonic: return 0.5 * x.squaredNorm();
    case PotentialKind::double_well: {
      const double s = x(0) * x(0);
      return -s + 2.0 * s * s;
    }
    case PotentialKind::double_slit:
      return slit_.height * slit_profile(x(0), slit_).value * barrier_profile(x(1), slit_).value;
    case PotentialKind::custom: return value_fn_(x);
  }
  return 0.0;
}

Vec PotentialModel::gradient(const Vec& x) const {
  check(x);
  switch (kind_) {
    case PotentialKind::harmonic: return x;
    case PotentialKind::double_well: {
      Vec g(1);
      g(0) = -2.0 * x(0) + 8.0 * x(0) * x(0) * x(0);
      return g;
    }
    case PotentialKind::double_slit: {
      const auto u = slit_profile(x(0), slit_);
      const auto v = barrier_profile(x(1), slit_);
      Vec g(2);
      g(0) = slit_.height * u.d1 * v.value;
      g(1) = slit_.height * u.value * v.d1;
      return g;
    }
    case PotentialKind::custom: return gradient_fn_(x);
  }
  return Vec::Zero(dimension_);
}

Mat PotentialModel::hessian(const Vec& x) const {
  check(x);
  switch (kind_) {
    case PotentialKind::harmonic: return Mat::Identity(dimension_, dimension_);
    case PotentialKind::double_well: {
      Mat h(1, 1);
      h(0, 0) = -2.0 + 24.0 * x(0) * x(0);
      return h;
    }
    case PotentialKind::double_slit: {
      const auto u = slit_profile(x(0), slit_);
      const auto v = barrier_profile(x(1), slit_);
      Mat h(2, 2);
      h(0, 0) = slit_.height * u.d2 * v.value;
      h(1, 1) = slit_.height * u.value * v.d2;
      h(0, 1) = h(1, 0) = slit_.height * u.d1 * v.d1;
      return h;
    }
    case PotentialKind::custom: return hessian_fn_(x);
  }
  return Mat::Zero(dimension_, dimension_);
}

EffectivePotential::EffectivePotential(PotentialModel base, double quadratic_shift)
    : base_(std::move(base)), shift_(quadratic_shift) {
  if (!(shift_ >= 0.0)) throw ConfigError("effective potential: quadratic shift must be >= 0");
}

double EffectivePotential::value(const Vec& x) const {
  return base_.value(x) + shift_ * x.squaredNorm();
}

Vec EffectivePotential::gradient(const Vec& x) const {
  return base_.gradient(x) + 2.0 * shift_ * x;
}

Mat EffectivePotential::hessian(const Vec& x) const {
  Mat h = base_.hessian(x);
  h.diagonal().array() += 2.0 * shift_;
  return h;
}

double quadratic_shift(const bath::SpectralModes& modes) {
  double shift = 0.0;
  for (std::size_t l = 0; l < modes.omegas.size(); ++l) {
    const double ratio = modes.couplings[l] / modes.omegas[l];
    shift += 0.5 * ratio * ratio;
  }
  return shift;
}

EffectivePotential effective(const PotentialModel& model, const bath::SpectralModes& modes) {
  return EffectivePotential(model, quadratic_shift(modes));
}

}  // namespace calsim::potentials
