#include "calsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace calsim::oracle {

namespace {

void match(std::vector<int>& remaining, Pairing& current, std::vector<Pairing>& out) {
  if (remaining.empty()) {
    out.push_back(current);
    return;
  }
  const int first = remaining.front();
  for (std::size_t k = 1; k < remaining.size(); ++k) {
    const int partner = remaining[k];
    std::vector<int> rest;
    for (std::size_t i = 1; i < remaining.size(); ++i)
      if (i != k) rest.push_back(remaining[i]);
    current.pairs.emplace_back(first, partner);
    match(rest, current, out);
    current.pairs.pop_back();
  }
}

}  // namespace

std::vector<Pairing> wick_pairings(int m) {
  if (m < 0 || m % 2 != 0 || m > 10)
    throw std::invalid_argument("wick_pairings: m must be even and in [0, 10]");
  std::vector<int> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), 1);
  std::vector<Pairing> out;
  Pairing current;
  match(all, current, out);
  return out;
}

std::size_t double_factorial_odd(int m) {
  std::size_t v = 1;
  for (int k = m - 1; k > 1; k -= 2) v *= static_cast<std::size_t>(k);
  return v;
}

complex pairing_sum(int m, const std::function<complex(int, int)>& pair_value) {
  complex total = 0.0;
  for (const auto& pairing : wick_pairings(m)) {
    complex term = 1.0;
    for (const auto& [i, j] : pairing.pairs) term *= pair_value(i, j);
    total += term;
  }
  return total;
}

complex brute_L_same(const std::vector<double>& tau,
                     const std::function<complex(double, double)>& B) {
  const int m = static_cast<int>(tau.size());
  if (m > 8) throw std::invalid_argument("brute_L_same: at most 8 times");
  return pairing_sum(m, [&](int i, int j) {
    return B(tau[static_cast<std::size_t>(j - 1)], tau[static_cast<std::size_t>(i - 1)]);
  });
}

complex recursive_L_same(const std::vector<double>& tau,
                         const std::function<complex(double, double)>& B) {
  if (tau.size() % 2 != 0) throw std::invalid_argument("recursive_L_same: odd number of times");
  if (tau.empty()) return 1.0;
  complex total = 0.0;
  for (std::size_t k = 1; k < tau.size(); ++k) {
    std::vector<double> rest;
    for (std::size_t i = 1; i < tau.size(); ++i)
      if (i != k) rest.push_back(tau[i]);
    total += B(tau[k], tau[0]) * recursive_L_same(rest, B);
  }
  return total;
}

namespace {

void grid_tuples(int level, int n, std::size_t start, double weight, std::size_t run,
                 const std::vector<double>& w, std::vector<std::size_t>& idx,
                 const IndexIntegrand& f, complex& sum) {
  if (level == n) {
    sum += weight * f(idx);
    return;
  }
  for (std::size_t i = start; i < w.size(); ++i) {
    const std::size_t r = (level > 0 && i == idx[static_cast<std::size_t>(level - 1)]) ? run + 1 : 1;
    idx[static_cast<std::size_t>(level)] = i;
    grid_tuples(level + 1, n, i, weight * w[i] / static_cast<double>(r), r, w, idx, f, sum);
  }
}

}  // namespace

complex simplex_grid_sum(int n, const std::vector<double>& weights, const IndexIntegrand& f) {
  if (n < 0) throw std::invalid_argument("simplex_grid_sum: n must be >= 0");
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  complex sum = 0.0;
  grid_tuples(0, n, 0, 1.0, 0, weights, idx, f, sum);
  return sum;
}

complex brute_simplex_integral(const TimeIntegrand& f, int n, double t,
                               std::size_t subdivisions) {
  if (n > 4) throw std::invalid_argument("brute_simplex_integral: n must be <= 4");
  if (subdivisions < 1) throw std::invalid_argument("brute_simplex_integral: no subdivisions");
  const double h = t / static_cast<double>(subdivisions);
  std::vector<double> w(subdivisions + 1, h);
  w.front() = w.back() = 0.5 * h;
  std::vector<double> times(static_cast<std::size_t>(n));
  return simplex_grid_sum(n, w, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t l = 0; l < idx.size(); ++l) times[l] = h * static_cast<double>(idx[l]);
    return f(times);
  });
}

namespace {

complex gauss_level(const TimeIntegrand& f, int level, double upper, std::vector<double>& times) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  if (level < 0) return f(times);
  auto inner = [&](double s) {
    times[static_cast<std::size_t>(level)] = s;
    return gauss_level(f, level - 1, s, times);
  };
  const double re = Rule::integrate([&](double s) { return inner(s).real(); }, 0.0, upper);
  const double im = Rule::integrate([&](double s) { return inner(s).imag(); }, 0.0, upper);
  return {re, im};
}

}  // namespace

complex gauss_simplex_integral(const TimeIntegrand& f, int n, double t) {
  if (n < 0 || n > 4) throw std::invalid_argument("gauss_simplex_integral: n must lie in [0, 4]");
  std::vector<double> times(static_cast<std::size_t>(n));
  return gauss_level(f, n - 1, t, times);
}

MonteCarloEstimate monte_carlo_simplex(const TimeIntegrand& f, int n, double t,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("monte_carlo_simplex: need at least 2 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, t);
  double volume = 1.0;
  for (int k = 1; k <= n; ++k) volume *= t / k;

  std::vector<double> times(static_cast<std::size_t>(n));
  double mean_re = 0.0, mean_im = 0.0, m2_re = 0.0, m2_im = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    for (auto& x : times) x = uniform(rng);
    std::sort(times.begin(), times.end());
    const complex v = f(times);
    const double dr = v.real() - mean_re;
    const double di = v.imag() - mean_im;
    mean_re += dr / static_cast<double>(s);
    mean_im += di / static_cast<double>(s);
    m2_re += dr * (v.real() - mean_re);
    m2_im += di * (v.imag() - mean_im);
  }
  const double n_s = static_cast<double>(samples);
  const double var = (m2_re + m2_im) / (n_s - 1.0);
  return {volume * complex(mean_re, mean_im), volume * std::sqrt(var / n_s)};
}

namespace {

// sin(w t)/w, continuous at w = 0.
double sin_over(double omega, double t) { return omega == 0.0 ? t : std::sin(omega * t) / omega; }

complex u_of(complex alpha0, double omega, double t) {
  return std::cos(omega * t) + alpha0 * sin_over(omega, t);
}

}  // namespace

std::vector<complex> exact_quadratic_evolution(const GaussianSpec& spec, double omega, double t,
                                               double epsilon, const std::vector<double>& x) {
  if (!(spec.alpha.imag() > 0.0)) throw std::invalid_argument("exact evolution: Im alpha <= 0");
  const complex a0 = spec.alpha;
  const double c = std::cos(omega * t);
  const double s = sin_over(omega, t);
  const double qt = spec.q * c + spec.p * s;
  const double pt = -omega * omega * spec.q * s + spec.p * c;
  const complex u = c + a0 * s;
  const complex du = -omega * omega * s + a0 * c;
  const complex alpha = du / u;
  const double action = 0.5 * (pt * qt - spec.p * spec.q);

  // Follow arg u(tau) continuously from u(0) = 1 to pick the branch of u^(-1/2).
  const std::size_t steps = 4096 + static_cast<std::size_t>(std::ceil(64.0 * std::abs(omega) * t));
  double arg = 0.0;
  complex prev = 1.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const complex cur = u_of(a0, omega, t * static_cast<double>(k) / static_cast<double>(steps));
    arg += std::arg(cur / prev);
    prev = cur;
  }
  const complex root = std::polar(std::pow(std::abs(u), -0.5), -0.5 * arg);
  const double norm = std::pow(a0.imag() / (std::numbers::pi * epsilon), 0.25);
  const complex prefactor = norm * root * std::polar(1.0, (action + spec.p * spec.q) / epsilon);

  std::vector<complex> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = x[i] - qt;
    const complex phase = (0.5 * alpha * y * y + pt * y) / epsilon;
    out[i] = prefactor * std::exp(complex(0.0, 1.0) * phase);
  }
  return out;
}

std::vector<double> exact_quadratic_density(const std::vector<GaussianSpec>& axes, double omega,
                                            double t, double epsilon,
                                            const std::vector<std::vector<double>>& x_axes) {
  if (axes.size() != x_axes.size() || axes.empty())
    throw std::invalid_argument("exact density: one spec per axis required");
  std::vector<std::vector<double>> marginals;
  std::size_t total = 1;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const auto psi = exact_quadratic_evolution(axes[d], omega, t, epsilon, x_axes[d]);
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    marginals.push_back(std::move(rho));
    total *= x_axes[d].size();
  }
  std::vector<double> out(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double v = 1.0;
    for (std::size_t d = axes.size(); d-- > 0;) {
      v *= marginals[d][rem % x_axes[d].size()];
      rem /= x_axes[d].size();
    }
    out[flat] = v;
  }
  return out;
}

JacobiResult jacobi_eigensolver(const Eigen::MatrixXcd& matrix, double tolerance,
                                int max_sweeps) {
  const auto n = matrix.rows();
  if (matrix.cols() != n) throw std::invalid_argument("jacobi: matrix must be square");
  Eigen::MatrixXcd a = matrix;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(matrix.norm(), 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  JacobiResult result;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > tolerance * scale; ++sweep) {
    ++result.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // Phase e makes the (p, q) entry real, then a real rotation annihilates it.
        const complex e = std::conj(a(p, q)) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double tt = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        const complex gpp = c, gpq = s, gqp = -s * e, gqq = c * e;

        for (Eigen::Index k = 0; k < n; ++k) {
          const complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (off_norm() > tolerance * scale) throw NumericError("jacobi: no convergence");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(a(x, x).real()) > std::abs(a(y, y).real());
  });
  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.eigenvalues(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    result.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return result;
}

complex correlation_at_zero_extended(const std::vector<double>& omegas,
                                     const std::vector<double>& couplings, double beta,
                                     double epsilon) {
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (std::size_t l = 0; l < omegas.size(); ++l) {
    const long double w = omegas[l];
    const long double c = couplings[l];
    const long double x = static_cast<long double>(beta) * epsilon * w / 2.0L;
    const long double term = 0.5L * c * c / (static_cast<long double>(epsilon) * w) / std::tanh(x);
    const long double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return {static_cast<double>(sum + comp), 0.0};
}

}  // namespace calsim::oracle
