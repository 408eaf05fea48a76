#include "calsim/fga.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace calsim::fga {

std::size_t AxisGrid::count() const {
  const double n = (max - min) / step;
  return static_cast<std::size_t>(std::llround(n)) + 1;
}

void AxisGrid::validate(const std::string& name) const {
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError(name + ": range must be finite");
  if (!(step > 0.0)) throw ConfigError(name + ": step must be > 0");
  if (max < min) throw ConfigError(name + ": max must be >= min");
  const double n = (max - min) / step;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw ConfigError(name + ": range is not a whole number of steps");
}

std::size_t PhaseSpaceGrid::size() const {
  if (p_axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : p_axes) n *= a.count();
  for (const auto& a : q_axes) n *= a.count();
  return n;
}

double PhaseSpaceGrid::weight() const {
  double w = 1.0;
  for (int d = 0; d < dimension(); ++d)
    w *= p_axes[static_cast<std::size_t>(d)].step * q_axes[static_cast<std::size_t>(d)].step;
  return w;
}

std::pair<std::size_t, std::size_t> PhaseSpaceGrid::axis_indices(std::size_t k, int d) const {
  const auto D = static_cast<std::size_t>(dimension());
  std::size_t ip = 0;
  std::size_t iq = 0;
  // Decode from the fastest axis (q_D) backwards.
  for (std::size_t slot = 2 * D; slot-- > 0;) {
    const auto& axis = slot >= D ? q_axes[slot - D] : p_axes[slot];
    const std::size_t n = axis.count();
    const std::size_t idx = k % n;
    k /= n;
    if (slot == D + static_cast<std::size_t>(d)) iq = idx;
    if (slot == static_cast<std::size_t>(d)) ip = idx;
  }
  return {ip, iq};
}

QuadraturePoint PhaseSpaceGrid::point(std::size_t k) const {
  const int D = dimension();
  QuadraturePoint pt;
  pt.p.resize(D);
  pt.q.resize(D);
  for (int d = 0; d < D; ++d) {
    const auto [ip, iq] = axis_indices(k, d);
    pt.p(d) = p_axes[static_cast<std::size_t>(d)][ip];
    pt.q(d) = q_axes[static_cast<std::size_t>(d)][iq];
  }
  pt.weight = weight();
  return pt;
}

PhaseSpaceGrid make_phase_space_grid(const std::vector<std::pair<double, double>>& p_ranges,
                                     const std::vector<std::pair<double, double>>& q_ranges,
                                     double dp, double dq) {
  if (p_ranges.empty() || p_ranges.size() != q_ranges.size())
    throw ConfigError("grid: p and q ranges must be non-empty with equal dimension");
  if (p_ranges.size() > static_cast<std::size_t>(kMaxDimension))
    throw ConfigError("grid: dimension exceeds 3");
  PhaseSpaceGrid grid;
  for (std::size_t d = 0; d < p_ranges.size(); ++d) {
    AxisGrid p{p_ranges[d].first, p_ranges[d].second, dp};
    AxisGrid q{q_ranges[d].first, q_ranges[d].second, dq};
    p.validate("grid.p[" + std::to_string(d) + "]");
    q.validate("grid.q[" + std::to_string(d) + "]");
    grid.p_axes.push_back(p);
    grid.q_axes.push_back(q);
  }
  return grid;
}

std::vector<QuadraturePoint> build_grid(const PhaseSpaceGrid& grid) {
  const std::size_t n = grid.size();
  if (n == 0) throw ConfigError("grid: empty phase-space grid");
  std::vector<QuadraturePoint> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) points.push_back(grid.point(k));
  return points;
}

std::size_t SpatialGrid::x_size() const {
  if (x_axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : x_axes) n *= a.count();
  return n;
}

void SpatialGrid::validate() const {
  if (x_axes.empty() || x_axes.size() > static_cast<std::size_t>(kMaxDimension))
    throw ConfigError("grid.x: dimension must lie in [1, 3]");
  if (y_axes.size() != x_axes.size()) throw ConfigError("grid.y: dimension must match grid.x");
  for (std::size_t d = 0; d < x_axes.size(); ++d) {
    x_axes[d].validate("grid.x[" + std::to_string(d) + "]");
    y_axes[d].validate("grid.y[" + std::to_string(d) + "]");
  }
}

AxisGrid default_y_axis(const AxisGrid& q_axis, double epsilon) {
  const double root = std::sqrt(epsilon);
  const double step = std::min(q_axis.step, root / 4.0);
  const double centre = 0.5 * (q_axis.min + q_axis.max);
  const double half = 0.5 * (q_axis.max - q_axis.min) + 6.0 * root;
  const double n = std::ceil(half / step - 1e-9);
  return {centre - n * step, centre + n * step, step};
}

TrajectoryState TrajectoryState::initial(const Vec& p, const Vec& q) {
  const auto D = p.size();
  TrajectoryState s;
  s.P = p;
  s.Q = q;
  s.S = 0.0;
  s.a = std::pow(2.0, 0.5 * static_cast<double>(D));
  s.dzP = CMat::Identity(D, D) * complex(0.0, -1.0);
  s.dzQ = CMat::Identity(D, D);
  return s;
}

CMat TrajectoryState::Z() const { return dzQ + complex(0.0, 1.0) * dzP; }

TrajectoryState& TrajectoryState::operator+=(const TrajectoryState& o) {
  P += o.P;
  Q += o.Q;
  S += o.S;
  a += o.a;
  dzP += o.dzP;
  dzQ += o.dzQ;
  return *this;
}

TrajectoryState operator*(double s, const TrajectoryState& x) {
  TrajectoryState y;
  y.P = s * x.P;
  y.Q = s * x.Q;
  y.S = s * x.S;
  y.a = s * x.a;
  y.dzP = s * x.dzP;
  y.dzQ = s * x.dzQ;
  return y;
}

SingularTrajectory::SingularTrajectory(std::size_t at_step, double det)
    : NumericError("singular Z (|det Z| = " + std::to_string(det) + ") at step " +
                   std::to_string(at_step)),
      step(at_step) {}

TrajectoryState rhs(const TrajectoryState& x, const potentials::EffectivePotential& potential) {
  const Mat hess = potential.hessian(x.Q);
  const CMat h = hess.cast<complex>();
  const CMat Z = x.Z();
  const double det = std::abs(Z.determinant());
  if (!(det > kSingularZThreshold)) throw SingularTrajectory(0, det);

  TrajectoryState dx;
  dx.P = -potential.gradient(x.Q);
  dx.Q = x.P;
  dx.S = 0.5 * x.P.squaredNorm() - potential.value(x.Q);
  const CMat M = x.dzP - complex(0.0, 1.0) * (x.dzQ * h);
  dx.a = 0.5 * x.a * (Z.inverse() * M).trace();
  dx.dzP = -(x.dzQ * h);
  dx.dzQ = x.dzP;
  return dx;
}

TrajectoryState rk4_step(const TrajectoryState& x, const potentials::EffectivePotential& potential,
                         double dt) {
  const TrajectoryState k1 = rhs(x, potential);
  TrajectoryState x2 = x;
  x2 += (0.5 * dt) * k1;
  const TrajectoryState k2 = rhs(x2, potential);
  TrajectoryState x3 = x;
  x3 += (0.5 * dt) * k2;
  const TrajectoryState k3 = rhs(x3, potential);
  TrajectoryState x4 = x;
  x4 += dt * k3;
  const TrajectoryState k4 = rhs(x4, potential);

  TrajectoryState sum = k1;
  sum += 2.0 * k2;
  sum += 2.0 * k3;
  sum += k4;
  TrajectoryState out = x;
  out += (dt / 6.0) * sum;
  return out;
}

namespace {

// Fixed-size mirror of TrajectoryState used by the time loop.
template <int D>
struct FixedState {
  using V = Eigen::Matrix<double, D, 1>;
  using M = Eigen::Matrix<complex, D, D>;
  V P, Q;
  double S{0.0};
  complex a;
  M dzP, dzQ;

  void add_scaled(double s, const FixedState& o) {
    P += s * o.P;
    Q += s * o.Q;
    S += s * o.S;
    a += s * o.a;
    dzP += s * o.dzP;
    dzQ += s * o.dzQ;
  }
  typename M::Scalar det_z() const { return (dzQ + complex(0.0, 1.0) * dzP).determinant(); }
};

template <int D>
FixedState<D> fixed_rhs(const FixedState<D>& x, const potentials::EffectivePotential& potential) {
  using M = typename FixedState<D>::M;
  const Vec q = x.Q;
  const M h = potential.hessian(q).template cast<complex>();
  const M Z = x.dzQ + complex(0.0, 1.0) * x.dzP;
  const double det = std::abs(Z.determinant());
  if (!(det > kSingularZThreshold)) throw SingularTrajectory(0, det);
  FixedState<D> dx;
  dx.P = -potential.gradient(q);
  dx.Q = x.P;
  dx.S = 0.5 * x.P.squaredNorm() - potential.value(q);
  const M qh = x.dzQ * h;
  const M m = x.dzP - complex(0.0, 1.0) * qh;
  dx.a = 0.5 * x.a * (Z.inverse() * m).trace();
  dx.dzP = -qh;
  dx.dzQ = x.dzP;
  return dx;
}

template <int D>
TrajectoryHistory evolve_fixed(const QuadraturePoint& point,
                               const potentials::EffectivePotential& potential,
                               std::size_t n_steps, double dt) {
  const TrajectoryState init = TrajectoryState::initial(point.p, point.q);
  FixedState<D> x;
  x.P = init.P;
  x.Q = init.Q;
  x.S = init.S;
  x.a = init.a;
  x.dzP = init.dzP;
  x.dzQ = init.dzQ;

  TrajectoryHistory history;
  history.q_samples.resize(static_cast<Eigen::Index>(n_steps + 1), D);
  history.q_samples.row(0) = x.Q.transpose();
  for (std::size_t j = 1; j <= n_steps; ++j) {
    try {
      const auto k1 = fixed_rhs<D>(x, potential);
      auto x2 = x;
      x2.add_scaled(0.5 * dt, k1);
      const auto k2 = fixed_rhs<D>(x2, potential);
      auto x3 = x;
      x3.add_scaled(0.5 * dt, k2);
      const auto k3 = fixed_rhs<D>(x3, potential);
      auto x4 = x;
      x4.add_scaled(dt, k3);
      const auto k4 = fixed_rhs<D>(x4, potential);
      auto sum = k1;
      sum.add_scaled(2.0, k2);
      sum.add_scaled(2.0, k3);
      sum.add_scaled(1.0, k4);
      x.add_scaled(dt / 6.0, sum);
    } catch (const SingularTrajectory&) {
      throw SingularTrajectory(j, std::abs(x.det_z()));
    }
    history.q_samples.row(static_cast<Eigen::Index>(j)) = x.Q.transpose();
  }
  const double det = std::abs(x.det_z());
  if (!(det > kSingularZThreshold)) throw SingularTrajectory(n_steps, det);
  TrajectoryState& out = history.final;
  out.P = x.P;
  out.Q = x.Q;
  out.S = x.S;
  out.a = x.a;
  out.dzP = x.dzP;
  out.dzQ = x.dzQ;
  return history;
}

}  // namespace

TrajectoryHistory evolve(const QuadraturePoint& point,
                         const potentials::EffectivePotential& potential, std::size_t n_steps,
                         double dt) {
  const auto D = point.q.size();
  if (point.p.size() != D || D != potential.dimension())
    throw std::invalid_argument("evolve: point and potential dimensions differ");
  if (n_steps > 0 && !(dt > 0.0)) throw ConfigError("time.dt: must be > 0");
  switch (D) {
    case 1: return evolve_fixed<1>(point, potential, n_steps, dt);
    case 2: return evolve_fixed<2>(point, potential, n_steps, dt);
    case 3: return evolve_fixed<3>(point, potential, n_steps, dt);
    default: throw std::invalid_argument("evolve: dimension must lie in [1, 3]");
  }
}

double classical_energy(const TrajectoryState& state,
                        const potentials::EffectivePotential& potential) {
  return 0.5 * state.P.squaredNorm() + potential.value(state.Q);
}

complex fbi_axis_overlap(const AxisFactor& factor, double p, double q, const AxisGrid& y_axis,
                         double epsilon) {
  const std::size_t n = y_axis.count();
  complex sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = y_axis[i];
    const double u = y - q;
    const double envelope = std::exp(-u * u / (2.0 * epsilon));
    if (envelope == 0.0) continue;
    sum += envelope * std::polar(1.0, -p * u / epsilon) * factor(y, epsilon);
  }
  return sum * y_axis.step;
}

complex fbi_overlap(const InitialWavefunction& psi0, const Vec& p, const Vec& q,
                    const std::vector<AxisGrid>& y_axes) {
  if (static_cast<int>(y_axes.size()) != psi0.dimension() || p.size() != psi0.dimension())
    throw std::invalid_argument("fbi_overlap: dimension mismatch");
  complex value = psi0.prefactor();
  for (int d = 0; d < psi0.dimension(); ++d)
    value *= fbi_axis_overlap(psi0.factors()[static_cast<std::size_t>(d)], p(d), q(d),
                              y_axes[static_cast<std::size_t>(d)], psi0.epsilon());
  return value;
}

double window_mass_outside(const Vec& q, const std::vector<AxisGrid>& y_axes, double epsilon) {
  const double s = std::sqrt(2.0 * epsilon);
  double worst = 0.0;
  for (std::size_t d = 0; d < y_axes.size(); ++d) {
    const auto qd = q(static_cast<Eigen::Index>(d));
    const double outside =
        0.5 * std::erfc((qd - y_axes[d].min) / s) + 0.5 * std::erfc((y_axes[d].max - qd) / s);
    worst = std::max(worst, outside);
  }
  return worst;
}

double window_radius(double epsilon, double cutoff) {
  if (!(cutoff > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 * epsilon * std::log(1.0 / cutoff));
}

AxisWindow axis_window(const AxisGrid& axis, double P, double Q, double epsilon, double cutoff) {
  const double radius = window_radius(epsilon, cutoff);
  const auto n = static_cast<double>(axis.count());
  double lo = 0.0;
  double hi = n - 1.0;
  if (std::isfinite(radius)) {
    lo = std::max(lo, std::ceil((Q - radius - axis.min) / axis.step));
    hi = std::min(hi, std::floor((Q + radius - axis.min) / axis.step));
  }
  AxisWindow w;
  if (hi < lo) return w;
  w.begin = static_cast<std::size_t>(lo);
  const auto len = static_cast<std::size_t>(hi - lo) + 1;
  w.re.resize(len);
  w.im.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double u = axis[w.begin + i] - Q;
    const double envelope = std::exp(-u * u / (2.0 * epsilon));
    const double phase = P * u / epsilon;
    w.re[i] = envelope * std::cos(phase);
    w.im[i] = envelope * std::sin(phase);
  }
  return w;
}

PacketFactors packet_factors(const TrajectoryState& final, complex overlap,
                             const std::vector<AxisGrid>& x_axes, double epsilon, double cutoff) {
  const auto D = static_cast<double>(final.Q.size());
  PacketFactors out;
  out.coefficient = std::pow(2.0 * std::numbers::pi * epsilon, -1.5 * D) * final.a *
                    std::polar(1.0, final.S / epsilon) * overlap;
  for (std::size_t d = 0; d < x_axes.size(); ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    out.windows.push_back(axis_window(x_axes[d], final.P(i), final.Q(i), epsilon, cutoff));
  }
  return out;
}

std::vector<complex> evaluate_psi_k(const TrajectoryHistory& history,
                                    const InitialWavefunction& psi0, const SpatialGrid& grid,
                                    const QuadraturePoint& point, double cutoff) {
  grid.validate();
  if (grid.dimension() != psi0.dimension())
    throw std::invalid_argument("evaluate_psi_k: grid and wavefunction dimensions differ");
  const double eps = psi0.epsilon();
  const complex overlap = fbi_overlap(psi0, point.p, point.q, grid.y_axes);
  const PacketFactors f = packet_factors(history.final, overlap, grid.x_axes, eps, cutoff);

  std::vector<complex> field(grid.x_size(), complex{0.0, 0.0});
  const int D = grid.dimension();
  std::vector<std::size_t> extent(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) extent[static_cast<std::size_t>(d)] = grid.x_axes[static_cast<std::size_t>(d)].count();

  // Iterate the window box with an odometer over the D axes.
  std::vector<std::size_t> idx(static_cast<std::size_t>(D), 0);
  for (const auto& w : f.windows)
    if (w.size() == 0) return field;
  while (true) {
    complex v = f.coefficient;
    std::size_t flat = 0;
    for (int d = 0; d < D; ++d) {
      const auto ud = static_cast<std::size_t>(d);
      const auto& w = f.windows[ud];
      v *= complex(w.re[idx[ud]], w.im[idx[ud]]);
      flat = flat * extent[ud] + w.begin + idx[ud];
    }
    field[flat] = v;
    int d = D - 1;
    for (; d >= 0; --d) {
      const auto ud = static_cast<std::size_t>(d);
      if (++idx[ud] < f.windows[ud].size()) break;
      idx[ud] = 0;
    }
    if (d < 0) break;
  }
  return field;
}

}  // namespace calsim::fga
