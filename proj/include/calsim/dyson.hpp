// dyson.hpp — multi-indices, per-trajectory time integrals, field accumulation
// and assembly of the truncated reduced density.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "calsim/bath.hpp"
#include "calsim/fga.hpp"
#include "calsim/types.hpp"

namespace calsim::dyson {

/// Counts N_j^(d) stored at slot d * rank + j.
struct MultiIndex {
  std::vector<unsigned> counts;

  unsigned order() const;
  double factorial() const;  // prod_slots counts!
  /// Nonzero slots as (slot, count) pairs in ascending slot order.
  std::vector<std::pair<std::size_t, unsigned>> support() const;
  bool operator==(const MultiIndex&) const = default;
};

/// All weak compositions of n into rank * dimension slots in ascending lexicographic
/// order, from (0, ..., 0, n) to (n, 0, ..., 0).
std::vector<MultiIndex> enumerate_multi_indices(unsigned n, std::size_t rank, int dimension);

/// binom(r D + n - 1, n)
std::size_t multi_index_count(unsigned n, std::size_t rank, int dimension);

/// Trapezoid weights on n_steps + 1 equispaced samples of spacing dt.
Eigen::VectorXd trapezoid_weights(std::size_t n_steps, double dt);

struct CouplingIntegrals {
  std::size_t rank{0};
  int dimension{0};
  std::vector<complex> values;  // slot d * rank + j

  complex operator()(std::size_t j, int d) const {
    return values[static_cast<std::size_t>(d) * rank + j];
  }
};

/// Precomputed real/imaginary parts of the kernel vectors for fast repeated integration.
class CouplingPlan {
 public:
  explicit CouplingPlan(const bath::LowRankKernel& kernel);

  std::size_t rank() const { return static_cast<std::size_t>(re_.cols()); }
  std::size_t n_steps() const { return static_cast<std::size_t>(re_.rows()) - 1; }

  /// I^(j,d) = int_0^t V_j(s) Q_d(s) ds by the trapezoid rule. Throws on grid mismatch.
  CouplingIntegrals integrate(const Eigen::MatrixXd& q_samples) const;

 private:
  Eigen::MatrixXd re_;
  Eigen::MatrixXd im_;
  Eigen::VectorXd weights_;
};

CouplingIntegrals coupling_integrals(const fga::TrajectoryHistory& history,
                                     const bath::LowRankKernel& kernel);

/// J_{k,N} = (1/N!) prod (I^(j,d))^N_j^(d).
complex j_k_N(const CouplingIntegrals& integrals, const MultiIndex& index);

/// B~(l dt) for l = 0..n_steps; index l is the kernel B(tau2, tau1) with tau2 - tau1 = l dt.
std::vector<complex> correlation_lags(const bath::CorrelationFunction& correlation,
                                      std::size_t n_steps, double dt);

/// J^(2) = -int_{tau1 <= tau2} B(tau2, tau1) Q(tau1).Q(tau2) on the trapezoid triangle,
/// using a stationary lag table.
complex pair_integral(const Eigen::MatrixXd& q_samples, const std::vector<complex>& lags, double dt);

/// Same integral for a general kernel matrix with entries(j, k) = B(k dt, j dt).
complex pair_integral(const Eigen::MatrixXd& q_samples, const Eigen::MatrixXcd& kernel, double dt);

/// Same integral for a low-rank kernel, in O(n r) via prefix sums along tau1.
complex pair_integral(const Eigen::MatrixXd& q_samples, const bath::LowRankKernel& kernel, double dt);

/// J^(m) = (J^(2))^(m/2) / (m/2)!. Throws std::invalid_argument for odd or negative m.
complex j_k_m(complex pair, int m);

enum class Truncation {
  arcs,     // 2n + m1 + m2 <= 2 nbar (node count of the diagram)
  printed,  // m1 + m2 <= nbar - 2n
};

std::string to_string(Truncation t);
Truncation parse_truncation(const std::string& name);

/// Same-axis budget for m1 + m2 at cross order n, or -1 if order n is excluded.
int same_axis_budget(Truncation t, unsigned nbar, unsigned n);

/// Stored fields: every multi-index with |N| <= nbar, each with m = 0, 2, ..., 2 nbar - 2 |N|.
class DysonLayout {
 public:
  DysonLayout(unsigned nbar, std::size_t rank, int dimension);

  unsigned nbar() const { return nbar_; }
  std::size_t rank() const { return rank_; }
  int dimension() const { return dimension_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::size_t field_count() const { return field_count_; }
  /// First field of multi-index i; its m = 2 mu lives at offset(i) + mu.
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  /// Number of stored m values for multi-index i.
  std::size_t m_count(std::size_t i) const;
  /// Largest stored m overall (2 nbar).
  int max_m() const { return static_cast<int>(2 * nbar_); }

 private:
  unsigned nbar_;
  std::size_t rank_;
  int dimension_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> offsets_;
  std::size_t field_count_{0};
};

/// Per-field weights w_k * c_k * J_{k,N} * J_k^(m) for one trajectory, in layout order.
std::vector<complex> field_coefficients(const DysonLayout& layout, complex packet_coefficient,
                                        double weight, const CouplingIntegrals& integrals,
                                        complex pair);

struct TrajectoryContribution {
  fga::PacketFactors packet;
  std::vector<complex> coefficients;  // one per field, already including weight
};

/// Field storage, split into real and imaginary arrays of field_count x n_x.
class DysonAccumulator {
 public:
  DysonAccumulator(DysonLayout layout, std::vector<std::size_t> x_extent);

  const DysonLayout& layout() const { return layout_; }
  std::size_t x_size() const { return n_x_; }
  const std::vector<std::size_t>& x_extent() const { return extent_; }

  /// Adds w * psi_k * J_{k,N} * J_k^(m) to every field.
  void accumulate(const fga::PacketFactors& packet, const CouplingIntegrals& integrals,
                  complex pair, double weight);
  /// Adds a block of contributions; each field entry sees the block in order.
  /// Parallel over fields when `parallel` is set; results do not depend on it.
  void accumulate_block(const std::vector<TrajectoryContribution>& block, bool parallel);

  complex field(std::size_t f, std::size_t x) const {
    return {re_[f * n_x_ + x], im_[f * n_x_ + x]};
  }

 private:
  void add_field(std::size_t f, const std::vector<TrajectoryContribution>& block);

  DysonLayout layout_;
  std::vector<std::size_t> extent_;
  std::size_t n_x_;
  std::vector<double> re_;
  std::vector<double> im_;
};

struct AssembledDensity {
  std::vector<double> rho;
  double max_imag_residue{0.0};
  double max_abs{0.0};
};

/// rho = sum_{|N| <= nbar} lambda^N N! sum_{m1, m2} I_N^(m1) conj(I_N^(m2)), restricted to
/// multi-indices using the first `rank` kernel vectors. Pass nbar/rank no larger than stored.
AssembledDensity assemble_density(const DysonAccumulator& acc, const Eigen::VectorXd& lambdas,
                                  unsigned nbar, std::size_t rank, Truncation truncation);

}  // namespace calsim::dyson
