#include "calsim/dyson.hpp"

#include <cmath>
#include <stdexcept>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace calsim::dyson {

unsigned MultiIndex::order() const {
  unsigned n = 0;
  for (auto c : counts) n += c;
  return n;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (auto c : counts)
    for (unsigned i = 2; i <= c; ++i) f *= i;
  return f;
}

std::vector<std::pair<std::size_t, unsigned>> MultiIndex::support() const {
  std::vector<std::pair<std::size_t, unsigned>> out;
  for (std::size_t s = 0; s < counts.size(); ++s)
    if (counts[s] != 0) out.emplace_back(s, counts[s]);
  return out;
}

namespace {

void compose(unsigned remaining, std::size_t slot, MultiIndex& current,
             std::vector<MultiIndex>& out) {
  if (slot + 1 == current.counts.size()) {
    current.counts[slot] = remaining;
    out.push_back(current);
    return;
  }
  for (unsigned c = 0; c <= remaining; ++c) {
    current.counts[slot] = c;
    compose(remaining - c, slot + 1, current, out);
  }
  current.counts[slot] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(unsigned n, std::size_t rank, int dimension) {
  if (rank < 1) throw std::invalid_argument("enumerate_multi_indices: rank must be >= 1");
  if (dimension < 1) throw std::invalid_argument("enumerate_multi_indices: dimension must be >= 1");
  MultiIndex current{std::vector<unsigned>(rank * static_cast<std::size_t>(dimension), 0)};
  std::vector<MultiIndex> out;
  compose(n, 0, current, out);
  return out;
}

std::size_t multi_index_count(unsigned n, std::size_t rank, int dimension) {
  // binom(s + n - 1, n) computed incrementally; each partial product is itself a binomial.
  const std::size_t s = rank * static_cast<std::size_t>(dimension);
  std::size_t value = 1;
  for (std::size_t i = 1; i <= n; ++i) value = value * (s - 1 + i) / i;
  return value;
}

Eigen::VectorXd trapezoid_weights(std::size_t n_steps, double dt) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_steps + 1), dt);
  w(0) *= 0.5;
  w(static_cast<Eigen::Index>(n_steps)) *= 0.5;
  if (n_steps == 0) w(0) = 0.0;
  return w;
}

CouplingPlan::CouplingPlan(const bath::LowRankKernel& kernel)
    : re_(kernel.vectors.real()),
      im_(kernel.vectors.imag()),
      weights_(trapezoid_weights(kernel.n_steps(), kernel.dt)) {}

CouplingIntegrals CouplingPlan::integrate(const Eigen::MatrixXd& q_samples) const {
  if (q_samples.rows() != re_.rows())
    throw std::invalid_argument("coupling_integrals: history has " +
                                std::to_string(q_samples.rows() - 1) + " steps, kernel has " +
                                std::to_string(re_.rows() - 1));
  CouplingIntegrals out;
  out.rank = rank();
  out.dimension = static_cast<int>(q_samples.cols());
  out.values.resize(out.rank * static_cast<std::size_t>(out.dimension));
  for (Eigen::Index d = 0; d < q_samples.cols(); ++d) {
    const Eigen::VectorXd wq = weights_.cwiseProduct(q_samples.col(d));
    const Eigen::VectorXd r = re_.transpose() * wq;
    const Eigen::VectorXd i = im_.transpose() * wq;
    for (std::size_t j = 0; j < out.rank; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out.values[static_cast<std::size_t>(d) * out.rank + j] = {r(jj), i(jj)};
    }
  }
  return out;
}

CouplingIntegrals coupling_integrals(const fga::TrajectoryHistory& history,
                                     const bath::LowRankKernel& kernel) {
  return CouplingPlan(kernel).integrate(history.q_samples);
}

complex j_k_N(const CouplingIntegrals& integrals, const MultiIndex& index) {
  if (index.counts.size() != integrals.values.size())
    throw std::invalid_argument("j_k_N: multi-index and integrals have different shapes");
  complex value = 1.0;
  for (const auto& [slot, count] : index.support()) {
    const complex base = integrals.values[slot];
    for (unsigned e = 1; e <= count; ++e) value *= base / static_cast<double>(e);
  }
  return value;
}

std::vector<complex> correlation_lags(const bath::CorrelationFunction& correlation,
                                      std::size_t n_steps, double dt) {
  std::vector<complex> lags(n_steps + 1);
  for (std::size_t l = 0; l <= n_steps; ++l) lags[l] = correlation(static_cast<double>(l) * dt);
  lags[0] = {lags[0].real(), 0.0};
  return lags;
}

complex pair_integral(const Eigen::MatrixXd& q_samples, const std::vector<complex>& lags,
                      double dt) {
  const auto n = q_samples.rows();
  if (static_cast<std::size_t>(n) != lags.size())
    throw std::invalid_argument("pair_integral: lag table does not match the history");
  const Eigen::VectorXd w = trapezoid_weights(static_cast<std::size_t>(n - 1), dt);
  const Eigen::MatrixXd u = w.asDiagonal() * q_samples;

  // R_l = sum_i u(i) . u(i + l); the diagonal l = 0 carries half weight.
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    double r = 0.0;
    for (Eigen::Index d = 0; d < u.cols(); ++d)
      r += u.col(d).head(n - l).dot(u.col(d).tail(n - l));
    if (l == 0) r *= 0.5;
    re += lags[static_cast<std::size_t>(l)].real() * r;
    im += lags[static_cast<std::size_t>(l)].imag() * r;
  }
  return {-re, -im};
}

complex pair_integral(const Eigen::MatrixXd& q_samples, const Eigen::MatrixXcd& kernel,
                      double dt) {
  const auto n = q_samples.rows();
  if (kernel.rows() != n || kernel.cols() != n)
    throw std::invalid_argument("pair_integral: kernel does not match the history");
  const Eigen::VectorXd w = trapezoid_weights(static_cast<std::size_t>(n - 1), dt);
  complex sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double h = i == j ? 0.5 : 1.0;
      // B(tau2 = j dt, tau1 = i dt) = entries(i, j)
      sum += h * w(i) * w(j) * kernel(i, j) * q_samples.row(i).dot(q_samples.row(j));
    }
  }
  return -sum;
}

complex pair_integral(const Eigen::MatrixXd& q_samples, const bath::LowRankKernel& kernel,
                      double dt) {
  const auto n = q_samples.rows();
  if (kernel.vectors.rows() != n)
    throw std::invalid_argument("pair_integral: kernel does not match the history");
  const Eigen::VectorXd w = trapezoid_weights(static_cast<std::size_t>(n - 1), dt);
  // entries(i, j) = sum_r lambda_r v(i, r) conj(v(j, r))
  complex sum = 0.0;
  for (Eigen::Index r = 0; r < kernel.vectors.cols(); ++r) {
    const auto v = kernel.vectors.col(r);
    complex per_rank = 0.0;
    for (Eigen::Index d = 0; d < q_samples.cols(); ++d) {
      complex prefix = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double u = w(j) * q_samples(j, d);
        const complex here = v(j) * u;
        per_rank += std::conj(v(j)) * u * (prefix + 0.5 * here);
        prefix += here;
      }
    }
    sum += kernel.lambdas(r) * per_rank;
  }
  return -sum;
}

complex j_k_m(complex pair, int m) {
  if (m < 0 || m % 2 != 0) throw std::invalid_argument("j_k_m: m must be even and >= 0");
  complex value = 1.0;
  for (int e = 1; e <= m / 2; ++e) value *= pair / static_cast<double>(e);
  return value;
}

std::string to_string(Truncation t) { return t == Truncation::arcs ? "arcs" : "printed"; }

Truncation parse_truncation(const std::string& name) {
  if (name == "arcs") return Truncation::arcs;
  if (name == "printed") return Truncation::printed;
  throw ConfigError("dyson.truncation: expected 'arcs' or 'printed', got '" + name + "'");
}

int same_axis_budget(Truncation t, unsigned nbar, unsigned n) {
  const int budget = t == Truncation::arcs ? 2 * static_cast<int>(nbar) - 2 * static_cast<int>(n)
                                           : static_cast<int>(nbar) - 2 * static_cast<int>(n);
  return n > nbar ? -1 : budget;
}

DysonLayout::DysonLayout(unsigned nbar, std::size_t rank, int dimension)
    : nbar_(nbar), rank_(rank), dimension_(dimension) {
  if (rank < 1) throw ConfigError("dyson.rank: must be >= 1");
  for (unsigned n = 0; n <= nbar; ++n) {
    auto level = enumerate_multi_indices(n, rank, dimension);
    for (auto& idx : level) {
      offsets_.push_back(field_count_);
      field_count_ += nbar - n + 1;
      indices_.push_back(std::move(idx));
    }
  }
}

std::size_t DysonLayout::m_count(std::size_t i) const {
  return nbar_ - indices_[i].order() + 1;
}

std::vector<complex> field_coefficients(const DysonLayout& layout, complex packet_coefficient,
                                        double weight, const CouplingIntegrals& integrals,
                                        complex pair) {
  const unsigned nbar = layout.nbar();
  if (integrals.values.size() != layout.rank() * static_cast<std::size_t>(layout.dimension()))
    throw std::invalid_argument("field_coefficients: integrals do not match the layout");

  // powers[slot][e] = I_slot^e / e!
  std::vector<std::vector<complex>> powers(integrals.values.size());
  for (std::size_t s = 0; s < powers.size(); ++s) {
    powers[s].resize(nbar + 1);
    powers[s][0] = 1.0;
    for (unsigned e = 1; e <= nbar; ++e)
      powers[s][e] = powers[s][e - 1] * integrals.values[s] / static_cast<double>(e);
  }
  std::vector<complex> jm(nbar + 1);
  for (unsigned mu = 0; mu <= nbar; ++mu) jm[mu] = j_k_m(pair, 2 * static_cast<int>(mu));

  const complex base = weight * packet_coefficient;
  std::vector<complex> out(layout.field_count());
  const auto& indices = layout.indices();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    complex jn = base;
    const auto& counts = indices[i].counts;
    for (std::size_t s = 0; s < counts.size(); ++s)
      if (counts[s] != 0) jn *= powers[s][counts[s]];
    const std::size_t off = layout.offset(i);
    const std::size_t mc = layout.m_count(i);
    for (std::size_t mu = 0; mu < mc; ++mu) out[off + mu] = jn * jm[mu];
  }
  return out;
}

DysonAccumulator::DysonAccumulator(DysonLayout layout, std::vector<std::size_t> x_extent)
    : layout_(std::move(layout)), extent_(std::move(x_extent)), n_x_(1) {
  if (extent_.size() != static_cast<std::size_t>(layout_.dimension()))
    throw std::invalid_argument("DysonAccumulator: x grid dimension differs from layout");
  for (auto e : extent_) n_x_ *= e;
  re_.assign(layout_.field_count() * n_x_, 0.0);
  im_.assign(layout_.field_count() * n_x_, 0.0);
}

void DysonAccumulator::accumulate(const fga::PacketFactors& packet,
                                  const CouplingIntegrals& integrals, complex pair,
                                  double weight) {
  std::vector<TrajectoryContribution> block(1);
  block[0].packet = packet;
  block[0].coefficients = field_coefficients(layout_, packet.coefficient, weight, integrals, pair);
  accumulate_block(block, false);
}

namespace {

// f[i] += c * w[i] over one contiguous row.
inline void axpy_row(double* fr, double* fi, double cr, double ci, const double* wr,
                     const double* wi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    fr[i] += cr * wr[i] - ci * wi[i];
    fi[i] += cr * wi[i] + ci * wr[i];
  }
}

}  // namespace

void DysonAccumulator::add_field(std::size_t f, const std::vector<TrajectoryContribution>& block) {
  double* fr = re_.data() + f * n_x_;
  double* fi = im_.data() + f * n_x_;
  const int D = layout_.dimension();
  for (const auto& traj : block) {
    const complex c = traj.coefficients[f];
    if (c == complex{0.0, 0.0}) continue;
    const auto& w = traj.packet.windows;
    if (D == 1) {
      axpy_row(fr + w[0].begin, fi + w[0].begin, c.real(), c.imag(), w[0].re.data(),
               w[0].im.data(), w[0].size());
    } else if (D == 2) {
      const std::size_t n2 = extent_[1];
      for (std::size_t a = 0; a < w[0].size(); ++a) {
        const complex ca = c * complex(w[0].re[a], w[0].im[a]);
        const std::size_t row = (w[0].begin + a) * n2 + w[1].begin;
        axpy_row(fr + row, fi + row, ca.real(), ca.imag(), w[1].re.data(), w[1].im.data(),
                 w[1].size());
      }
    } else {
      const std::size_t n2 = extent_[1];
      const std::size_t n3 = extent_[2];
      for (std::size_t a = 0; a < w[0].size(); ++a) {
        const complex ca = c * complex(w[0].re[a], w[0].im[a]);
        for (std::size_t b = 0; b < w[1].size(); ++b) {
          const complex cb = ca * complex(w[1].re[b], w[1].im[b]);
          const std::size_t row = ((w[0].begin + a) * n2 + w[1].begin + b) * n3 + w[2].begin;
          axpy_row(fr + row, fi + row, cb.real(), cb.imag(), w[2].re.data(), w[2].im.data(),
                   w[2].size());
        }
      }
    }
  }
}

void DysonAccumulator::accumulate_block(const std::vector<TrajectoryContribution>& block,
                                        bool parallel) {
  for (const auto& traj : block) {
    if (traj.coefficients.size() != layout_.field_count() ||
        traj.packet.windows.size() != extent_.size())
      throw std::invalid_argument("accumulate: contribution does not match the accumulator");
  }
  const std::size_t nf = layout_.field_count();
  if (!parallel) {
    for (std::size_t f = 0; f < nf; ++f) add_field(f, block);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, nf),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t f = r.begin(); f != r.end(); ++f) add_field(f, block);
                    });
}

AssembledDensity assemble_density(const DysonAccumulator& acc, const Eigen::VectorXd& lambdas,
                                  unsigned nbar, std::size_t rank, Truncation truncation) {
  const auto& layout = acc.layout();
  if (nbar > layout.nbar())
    throw std::invalid_argument("assemble_density: nbar exceeds the stored order");
  if (rank < 1 || rank > layout.rank() || static_cast<std::size_t>(lambdas.size()) < rank)
    throw std::invalid_argument("assemble_density: rank exceeds the stored rank");

  const std::size_t nx = acc.x_size();
  std::vector<double> rho(nx, 0.0);
  std::vector<double> imag(nx, 0.0);
  const auto& indices = layout.indices();
  const std::size_t r_stored = layout.rank();

  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& idx = indices[i];
    const unsigned n = idx.order();
    const int budget = same_axis_budget(truncation, nbar, n);
    if (budget < 0) continue;
    double coefficient = idx.factorial();
    bool used = true;
    for (const auto& [slot, count] : idx.support()) {
      const std::size_t j = slot % r_stored;
      if (j >= rank) {
        used = false;
        break;
      }
      coefficient *= std::pow(lambdas(static_cast<Eigen::Index>(j)), static_cast<int>(count));
    }
    if (!used) continue;

    const std::size_t off = layout.offset(i);
    const int mu_max = budget / 2;
    for (std::size_t x = 0; x < nx; ++x) {
      double sr = 0.0;
      double si = 0.0;
      for (int m1 = 0; m1 <= mu_max; ++m1) {
        const complex a = acc.field(off + static_cast<std::size_t>(m1), x);
        for (int m2 = 0; m1 + m2 <= mu_max; ++m2) {
          const complex b = std::conj(acc.field(off + static_cast<std::size_t>(m2), x));
          const complex p = a * b;
          sr += p.real();
          si += p.imag();
        }
      }
      rho[x] += coefficient * sr;
      imag[x] += coefficient * si;
    }
  }

  AssembledDensity out;
  for (std::size_t x = 0; x < nx; ++x) {
    out.max_abs = std::max(out.max_abs, std::abs(rho[x]));
    out.max_imag_residue = std::max(out.max_imag_residue, std::abs(imag[x]));
  }
  out.rho = std::move(rho);
  return out;
}

}  // namespace calsim::dyson
