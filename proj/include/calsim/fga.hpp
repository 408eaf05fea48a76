// fga.hpp — frozen Gaussian trajectories and the per-trajectory wavefunction.

#pragma once

#include <cstddef>
#include <vector>

#include "calsim/potentials.hpp"
#include "calsim/types.hpp"
#include "calsim/wavefunction.hpp"

namespace calsim::fga {

struct QuadraturePoint {
  Vec p;
  Vec q;
  double weight{0.0};
};

/// Uniform axis min, min + step, ..., max. The span must be an integer number of steps.
struct AxisGrid {
  double min{0.0};
  double max{0.0};
  double step{1.0};

  std::size_t count() const;
  double operator[](std::size_t i) const { return min + static_cast<double>(i) * step; }
  /// Throws ConfigError mentioning `name` when the axis is malformed.
  void validate(const std::string& name) const;
};

/// Phase-space box for the initial (p, q) quadrature, one AxisGrid per dimension.
struct PhaseSpaceGrid {
  std::vector<AxisGrid> p_axes;
  std::vector<AxisGrid> q_axes;

  int dimension() const { return static_cast<int>(p_axes.size()); }
  std::size_t size() const;
  double weight() const;  // (dp dq)^D
  /// Point with flat index k; axes ordered (p_1..p_D, q_1..q_D), last q axis fastest.
  QuadraturePoint point(std::size_t k) const;
  /// Per-axis indices (ip, iq) of point k for axis d.
  std::pair<std::size_t, std::size_t> axis_indices(std::size_t k, int d) const;
};

PhaseSpaceGrid make_phase_space_grid(const std::vector<std::pair<double, double>>& p_ranges,
                                     const std::vector<std::pair<double, double>>& q_ranges,
                                     double dp, double dq);
std::vector<QuadraturePoint> build_grid(const PhaseSpaceGrid& grid);

struct SpatialGrid {
  std::vector<AxisGrid> x_axes;
  std::vector<AxisGrid> y_axes;

  int dimension() const { return static_cast<int>(x_axes.size()); }
  std::size_t x_size() const;
  void validate() const;
};

/// q-grid extended by 6 sqrt(eps), step min(dq, sqrt(eps)/4), snapped to whole steps.
AxisGrid default_y_axis(const AxisGrid& q_axis, double epsilon);

struct TrajectoryState {
  Vec P;
  Vec Q;
  double S{0.0};
  complex a;
  CMat dzP;
  CMat dzQ;

  static TrajectoryState initial(const Vec& p, const Vec& q);
  CMat Z() const;
  TrajectoryState& operator+=(const TrajectoryState& other);
};

TrajectoryState operator*(double s, const TrajectoryState& x);

/// Right-hand side of the trajectory equations. Throws NumericError on singular Z.
TrajectoryState rhs(const TrajectoryState& state, const potentials::EffectivePotential& potential);

/// One classical RK4 step.
TrajectoryState rk4_step(const TrajectoryState& state,
                         const potentials::EffectivePotential& potential, double dt);

struct TrajectoryHistory {
  Eigen::MatrixXd q_samples;  // (n_steps + 1) x D
  TrajectoryState final;

  std::size_t n_steps() const { return static_cast<std::size_t>(q_samples.rows()) - 1; }
};

/// Thrown when |det Z| drops below the singularity threshold.
class SingularTrajectory : public NumericError {
 public:
  SingularTrajectory(std::size_t step, double det);
  std::size_t step;
};

inline constexpr double kSingularZThreshold = 1e-12;

TrajectoryHistory evolve(const QuadraturePoint& point,
                         const potentials::EffectivePotential& potential, std::size_t n_steps,
                         double dt);

double classical_energy(const TrajectoryState& state,
                        const potentials::EffectivePotential& potential);

/// Y_d(p, q) = sum_y dy exp(-(y-q)^2/(2 eps) - i p (y-q)/eps) f_d(y) for one axis factor.
complex fbi_axis_overlap(const AxisFactor& factor, double p, double q, const AxisGrid& y_axis,
                         double epsilon);

/// Full y-overlap including the global prefactor of psi0.
complex fbi_overlap(const InitialWavefunction& psi0, const Vec& p, const Vec& q,
                    const std::vector<AxisGrid>& y_axes);

/// Fraction of the Gaussian window exp(-(y-q)^2/(2 eps)) lying outside [min, max] on each axis (max over axes).
double window_mass_outside(const Vec& q, const std::vector<AxisGrid>& y_axes, double epsilon);

/// Radius beyond which exp(-u^2/(2 eps)) < cutoff.
double window_radius(double epsilon, double cutoff);

/// Values of exp(-(x-Q)^2/(2 eps) + i P (x-Q)/eps) on a contiguous range of one x axis.
struct AxisWindow {
  std::size_t begin{0};
  std::vector<double> re;
  std::vector<double> im;

  std::size_t size() const { return re.size(); }
};

AxisWindow axis_window(const AxisGrid& axis, double P, double Q, double epsilon, double cutoff);

/// psi_k on the x-grid, split as coefficient * prod_d window_d(x_d).
struct PacketFactors {
  complex coefficient;  // (2 pi eps)^(-3D/2) a exp(iS/eps) Y
  std::vector<AxisWindow> windows;
};

PacketFactors packet_factors(const TrajectoryState& final, complex overlap,
                             const std::vector<AxisGrid>& x_axes, double epsilon, double cutoff);

/// Dense psi_k on the full x-grid, row-major with the last axis fastest.
std::vector<complex> evaluate_psi_k(const TrajectoryHistory& history,
                                    const InitialWavefunction& psi0, const SpatialGrid& grid,
                                    const QuadraturePoint& point, double cutoff = 0.0);

}  // namespace calsim::fga
