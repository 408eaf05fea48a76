#include "calsim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "calsim/bath.hpp"
#include "calsim/dyson.hpp"
#include "calsim/fga.hpp"
#include "calsim/oracle.hpp"
#include "calsim/potentials.hpp"

namespace calsim::verify {

namespace {

template <class F>
CheckResult timed(std::string id, std::string description, F&& body) {
  CheckResult r;
  r.id = std::move(id);
  r.description = std::move(description);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bath::BathParameters paper_bath(double xi) {
  bath::BathParameters p;
  p.xi = xi;
  p.epsilon = 1.0 / 64.0;
  return p;
}

// Independent trapezoid weights for the oracle side.
std::vector<double> oracle_weights(std::size_t n_steps, double dt) {
  std::vector<double> w(n_steps + 1, dt);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// Random smooth real path sampled on the grid: g + h sin(k s + phi) + l s^2.
Eigen::VectorXd smooth_path(std::mt19937_64& rng, std::size_t n_steps, double dt) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double g = u(rng), h = u(rng), k = 3.0 * u(rng), phi = u(rng), l = 0.5 * u(rng);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_steps + 1));
  for (std::size_t i = 0; i <= n_steps; ++i) {
    const double s = static_cast<double>(i) * dt;
    out(static_cast<Eigen::Index>(i)) = g + h * std::sin(k * s + phi) + l * s * s;
  }
  return out;
}

}  // namespace

CheckResult wick_counts() {
  return timed("1", "Wick pairing counts for m = 2, 4, 6", [](CheckResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t c2 = oracle::wick_pairings(2).size();
    const std::size_t c4 = oracle::wick_pairings(4).size();
    const std::size_t c6 = oracle::wick_pairings(6).size();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = c2 == 1 && c4 == 3 && c6 == 15 && secs < 1.0;
    r.detail = "counts " + std::to_string(c2) + ", " + std::to_string(c4) + ", " +
               std::to_string(c6) + " (expected 1, 3, 15)";
  });
}

CheckResult product_formula(int cases, std::uint64_t seed) {
  return timed("2", "product formula vs ordered-simplex quadrature", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n_steps = 200;
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
      const int D = 1 + c % 2;
      const std::size_t rank = 1 + static_cast<std::size_t>((c / 2) % 2);
      const unsigned n = 1 + static_cast<unsigned>(c % 3);
      const double t = 0.5 + 1.5 * std::abs(u(rng));
      const double dt = t / static_cast<double>(n_steps);

      bath::LowRankKernel kernel;
      kernel.rank = rank;
      kernel.dt = dt;
      kernel.lambdas = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rank));
      kernel.vectors.resize(static_cast<Eigen::Index>(n_steps + 1), static_cast<Eigen::Index>(rank));
      for (std::size_t j = 0; j < rank; ++j) {
        const Eigen::VectorXd re = smooth_path(rng, n_steps, dt);
        const Eigen::VectorXd im = smooth_path(rng, n_steps, dt);
        for (Eigen::Index i = 0; i < re.size(); ++i)
          kernel.vectors(i, static_cast<Eigen::Index>(j)) = complex(re(i), im(i));
      }
      Eigen::MatrixXd q(static_cast<Eigen::Index>(n_steps + 1), D);
      for (int d = 0; d < D; ++d) q.col(d) = smooth_path(rng, n_steps, dt);

      dyson::MultiIndex index{std::vector<unsigned>(rank * static_cast<std::size_t>(D), 0)};
      std::uniform_int_distribution<std::size_t> slot(0, index.counts.size() - 1);
      for (unsigned k = 0; k < n; ++k) ++index.counts[slot(rng)];

      const complex fast = dyson::j_k_N(dyson::CouplingPlan(kernel).integrate(q), index);

      std::vector<std::size_t> labels;
      for (std::size_t s = 0; s < index.counts.size(); ++s)
        for (unsigned k = 0; k < index.counts[s]; ++k) labels.push_back(s);
      const auto w = oracle_weights(n_steps, dt);
      const complex brute = oracle::simplex_grid_sum(
          static_cast<int>(n), w, [&](const std::vector<std::size_t>& idx) {
            auto perm = labels;
            complex sum = 0.0;
            do {
              complex term = 1.0;
              for (std::size_t l = 0; l < perm.size(); ++l) {
                const std::size_t j = perm[l] % rank;
                const auto d = static_cast<Eigen::Index>(perm[l] / rank);
                const auto i = static_cast<Eigen::Index>(idx[l]);
                term *= kernel.vectors(i, static_cast<Eigen::Index>(j)) * q(i, d);
              }
              sum += term;
            } while (std::next_permutation(perm.begin(), perm.end()));
            return sum;
          });
      worst = std::max(worst, std::abs(fast - brute) / std::abs(brute));
    }
    r.passed = worst <= 1e-6;
    r.detail = std::to_string(cases) + " cases, max relative error " + sci(worst) + " (tol 1e-6)";
  });
}

CheckResult power_formula(int cases, std::uint64_t seed) {
  return timed("3", "power formula vs Wick-pairing simplex quadrature", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n_steps = 200;
    const auto params = paper_bath(1.6);
    const bath::CorrelationFunction B(bath::ohmic_modes(params), params);
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
      const int m = c < cases / 2 ? 2 : 4;
      const int D = 1 + c % 2;
      const double t = 0.5 + u(rng);
      const double dt = t / static_cast<double>(n_steps);
      Eigen::MatrixXd q(static_cast<Eigen::Index>(n_steps + 1), D);
      for (int d = 0; d < D; ++d) q.col(d) = smooth_path(rng, n_steps, dt);

      const auto lags = dyson::correlation_lags(B, n_steps, dt);
      const complex fast = dyson::j_k_m(dyson::pair_integral(q, lags, dt), m);

      std::vector<complex> table(n_steps + 1);
      for (std::size_t l = 0; l <= n_steps; ++l) table[l] = B(static_cast<double>(l) * dt);
      Eigen::MatrixXd dots = q * q.transpose();
      const auto pairings = oracle::wick_pairings(m);
      const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
      const auto w = oracle_weights(n_steps, dt);
      const complex brute = oracle::simplex_grid_sum(m, w, [&](const std::vector<std::size_t>& idx) {
        complex total = 0.0;
        for (const auto& p : pairings) {
          complex term = 1.0;
          for (const auto& [a, b] : p.pairs) {
            const std::size_t i = idx[static_cast<std::size_t>(a - 1)];
            const std::size_t j = idx[static_cast<std::size_t>(b - 1)];
            term *= table[j - i] * dots(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          }
          total += term;
        }
        return sign * total;
      });
      worst = std::max(worst, std::abs(fast - brute) / std::abs(brute));
    }
    r.passed = worst <= 1e-6;
    r.detail = std::to_string(cases) + " cases (m = 2, 4), max relative error " + sci(worst) +
               " (tol 1e-6)";
  });
}

CheckResult lowrank_exactness() {
  return timed("4", "low-rank reconstruction and truncation error", [](CheckResult& r) {
    const auto params = paper_bath(1.6);
    const std::size_t n_steps = 1000;
    const double dt = 1e-3;
    const auto matrix = bath::correlation_matrix(bath::ohmic_modes(params), params, n_steps, dt);
    const auto spectrum = bath::decompose(matrix);
    const double norm = matrix.entries.norm();

    const auto full = bath::truncate(spectrum, n_steps + 1);
    const double full_rel = (full.reconstruct() - matrix.entries).norm() / norm;

    double worst_gap = 0.0;
    bool monotone = true;
    double previous = INFINITY;
    double err20 = 0.0;
    for (std::size_t rank : {1, 2, 5, 10, 20, 30, 40}) {
      const auto k = bath::truncate(spectrum, rank);
      const double direct = (k.reconstruct() - matrix.entries).norm();
      worst_gap = std::max(worst_gap, std::abs(direct - k.frobenius_error));
      monotone = monotone && k.frobenius_error <= previous;
      previous = k.frobenius_error;
      if (rank == 20) err20 = k.frobenius_error;
    }
    r.passed = full_rel <= 1e-10 && worst_gap <= 1e-10 && monotone;
    r.detail = "full-rank rel error " + sci(full_rel) + ", |direct - discarded norm| " +
               sci(worst_gap) + ", monotone " + (monotone ? "yes" : "no") +
               ", error at r=20: " + sci(err20) + " (N_t=1000, dt=1e-3, xi=1.6)";
  });
}

CheckResult ohmic_endpoint() {
  return timed("5", "Ohmic endpoint w_L = w_max", [](CheckResult& r) {
    const auto params = paper_bath(1.6);
    const auto modes = bath::ohmic_modes(params);
    const double gap = std::abs(modes.omegas.back() - params.omega_max);
    r.passed = gap <= 1e-12;
    r.detail = "|w_L - w_max| = " + sci(gap) + " (L=400, w_max=10, w_c=2.5)";
  });
}

CheckResult energy_conservation(std::size_t trajectories) {
  return timed("10", "trajectory energy drift, harmonic, dt=1e-3, t=3", [&](CheckResult& r) {
    const auto params = paper_bath(1.6);
    const auto veff =
        potentials::effective(potentials::PotentialModel::harmonic(1), bath::ohmic_modes(params));
    const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(trajectories))));
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t a = 0; a < side && used < trajectories; ++a) {
      for (std::size_t b = 0; b < side && used < trajectories; ++b, ++used) {
        Vec p(1), q(1);
        p(0) = -2.0 + 4.0 * static_cast<double>(a) / static_cast<double>(side - 1);
        q(0) = -2.0 + 4.0 * static_cast<double>(b) / static_cast<double>(side - 1);
        auto state = fga::TrajectoryState::initial(p, q);
        const double e0 = fga::classical_energy(state, veff);
        for (int step = 0; step < 3000; ++step) {
          state = fga::rk4_step(state, veff, 1e-3);
          const double e = fga::classical_energy(state, veff);
          const double drift = e0 != 0.0 ? std::abs(e - e0) / std::abs(e0) : std::abs(e - e0);
          worst = std::max(worst, drift);
        }
      }
    }
    r.passed = worst <= 1e-8;
    r.detail = std::to_string(used) + " trajectories, max relative drift " + sci(worst) + " (tol 1e-8)";
  });
}

CheckResult eigensolver_agreement() {
  return timed("E1", "library eigensolver vs Jacobi oracle", [](CheckResult& r) {
    const auto params = paper_bath(1.6);
    const auto matrix = bath::correlation_matrix(bath::ohmic_modes(params), params, 60, 1.0 / 60.0);
    const auto fast = bath::decompose(matrix);
    const auto slow = oracle::jacobi_eigensolver(matrix.entries);
    const double gap = (fast.eigenvalues - slow.eigenvalues).cwiseAbs().maxCoeff();
    const double rel = gap / matrix.entries.norm();
    r.passed = rel <= 1e-12;
    r.detail = "max eigenvalue gap / ||B||_F = " + sci(rel) + " after " +
               std::to_string(slow.sweeps) + " Jacobi sweeps";
  });
}

CheckResult correlation_at_zero() {
  return timed("E2", "B(0) vs extended-precision sum", [](CheckResult& r) {
    const auto params = paper_bath(1.6);
    const auto modes = bath::ohmic_modes(params);
    const complex fast = bath::correlation_function(modes, params, 0.0);
    const complex slow =
        oracle::correlation_at_zero_extended(modes.omegas, modes.couplings, params.beta, params.epsilon);
    const double rel = std::abs(fast - slow) / std::abs(slow);
    r.passed = rel <= 1e-13;
    r.detail = "relative gap " + sci(rel);
  });
}

CheckResult harmonic_amplitude() {
  return timed("E3", "amplitude closed form, unit harmonic Hessian", [](CheckResult& r) {
    const int D = 2;
    const potentials::EffectivePotential veff(potentials::PotentialModel::harmonic(D), 0.0);
    Vec p(D), q(D);
    p << 0.3, -0.7;
    q << 1.0, 0.25;
    auto state = fga::TrajectoryState::initial(p, q);
    const double dt = 1e-3;
    for (int s = 0; s < 2000; ++s) state = fga::rk4_step(state, veff, dt);
    const complex exact = std::pow(2.0, D / 2.0) * std::polar(1.0, -D * 2.0 / 2.0);
    const double gap = std::abs(state.a - exact);
    r.passed = gap <= 1e-9;
    r.detail = "|a(2) - 2^{D/2} e^{-iDt/2}| = " + sci(gap);
  });
}

std::vector<CheckResult> run_all() {
  return {wick_counts(),        product_formula(),     power_formula(),
          lowrank_exactness(),  ohmic_endpoint(),      energy_conservation(),
          eigensolver_agreement(), correlation_at_zero(), harmonic_amplitude()};
}

std::string format_row(const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-4s %-3s %7.2fs  ", r.passed ? "PASS" : "FAIL", r.id.c_str(),
                r.seconds);
  return std::string(buf) + r.description + ": " + r.detail;
}

}  // namespace calsim::verify
