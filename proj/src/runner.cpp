#include "calsim/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include <spdlog/spdlog.h>
#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace calsim::runner {

namespace {

std::size_t effective_rank(const config::RunConfig& c) {
  return c.dyson.nbar > 0 ? c.dyson.rank : 1;
}

// Per-axis FBI overlaps on the (p_d, q_d) grid of one axis, row-major in (ip, iq).
struct OverlapTable {
  std::size_t nq{0};
  std::vector<complex> values;
};

}  // namespace

double field_bytes(const config::RunConfig& c) {
  dyson::DysonLayout layout(c.dyson.nbar, effective_rank(c), c.system.dimension);
  return static_cast<double>(layout.field_count()) *
         static_cast<double>(c.spatial_grid().x_size()) * 16.0;
}

std::shared_ptr<const bath::SpectralDecomposition> correlation_spectrum(
    const config::RunConfig& c) {
  const auto modes = bath::ohmic_modes(c.bath);
  const std::size_t n_steps = c.time.n_steps();
  const auto n = static_cast<Eigen::Index>(n_steps + 1);
  if (modes.decoupled()) {
    // The correlation matrix vanishes identically.
    auto zero = std::make_shared<bath::SpectralDecomposition>();
    zero->dt = c.time.dt;
    zero->eigenvalues = Eigen::VectorXd::Zero(n);
    zero->eigenvectors = Eigen::MatrixXcd::Identity(n, n);
    return zero;
  }
  const auto matrix = bath::correlation_matrix(modes, c.bath, n_steps, c.time.dt);
  return std::make_shared<bath::SpectralDecomposition>(bath::decompose(matrix));
}

dyson::AssembledDensity RunResult::assemble(unsigned nbar, std::size_t rank) const {
  return dyson::assemble_density(*accumulator, lambdas, nbar, rank, config.dyson.truncation);
}

RunResult run(const config::RunConfig& c, const RunOptions& options) {
  c.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t workers = options.workers.value_or(c.execution.workers);
  if (workers < 1) throw ConfigError("execution.workers: must be >= 1");

  const int D = c.system.dimension;
  const double eps = c.system.epsilon;
  const auto modes = bath::ohmic_modes(c.bath);
  const auto veff = potentials::effective(c.potential_model(), modes);
  const auto psi0 = c.initial_wavefunction();
  const auto grid = c.spatial_grid();
  const auto phase = c.phase_space_grid();
  const std::size_t n_steps = c.time.n_steps();
  const double dt = c.time.dt;
  const unsigned nbar = c.dyson.nbar;
  const std::size_t rank = effective_rank(c);
  const bool coupled = nbar > 0 && !modes.decoupled();

  // Memory guard: fields plus one block of per-trajectory coefficients.
  dyson::DysonLayout layout(nbar, rank, D);
  const double budget = c.execution.memory_budget_mb * 1024.0 * 1024.0;
  const double needed = static_cast<double>(layout.field_count()) *
                        (static_cast<double>(grid.x_size()) +
                         static_cast<double>(c.execution.block_size)) * 16.0;
  if (needed > budget)
    throw MemoryRefusal("memory guard: " + std::to_string(layout.field_count()) + " fields x " +
                        std::to_string(grid.x_size()) + " points need " +
                        std::to_string(needed / 1048576.0) + " MiB, budget is " +
                        std::to_string(c.execution.memory_budget_mb) + " MiB");

  // The initial state must be resolved by the y grid.
  for (int d = 0; d < D; ++d) {
    const auto& f = psi0.factors()[static_cast<std::size_t>(d)];
    const auto& y = grid.y_axes[static_cast<std::size_t>(d)];
    double sum = 0.0;
    for (std::size_t i = 0; i < y.count(); ++i) sum += std::norm(f(y[i], eps));
    const double rel = std::abs(sum * y.step / f.norm_squared() - 1.0);
    if (rel > 1e-6)
      spdlog::warn("initial wavefunction: axis {} norm on the y grid is off by {:.3e}", d + 1, rel);
  }
  {
    double worst = 0.0;
    for (int d = 0; d < D; ++d) {
      const auto& q = phase.q_axes[static_cast<std::size_t>(d)];
      for (double qv : {q.min, q.max}) {
        Vec v = Vec::Zero(D);
        for (int e = 0; e < D; ++e) v(e) = grid.y_axes[static_cast<std::size_t>(e)].min + 0.5 * (grid.y_axes[static_cast<std::size_t>(e)].max - grid.y_axes[static_cast<std::size_t>(e)].min);
        v(d) = qv;
        worst = std::max(worst, fga::window_mass_outside(v, grid.y_axes, eps));
      }
    }
    if (worst > 1e-8)
      spdlog::warn("y grid: Gaussian window mass outside the grid reaches {:.3e}", worst);
  }

  RunResult result;
  result.config = c;
  result.x_axes = grid.x_axes;
  result.workers = workers;
  result.lambdas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rank));

  std::optional<dyson::CouplingPlan> plan;
  std::vector<complex> lags;
  std::optional<bath::LowRankKernel> pair_kernel;
  if (nbar > 0) {
    auto spectrum = options.spectrum ? options.spectrum : correlation_spectrum(c);
    if (static_cast<std::size_t>(spectrum->eigenvalues.size()) != n_steps + 1 ||
        std::abs(spectrum->dt - dt) > 1e-15 * dt)
      throw ConfigError("dyson: supplied spectrum does not match the time grid");
    const auto kernel = bath::truncate(*spectrum, rank);
    result.lambdas = kernel.lambdas;
    result.frobenius_error = kernel.frobenius_error;
    if (coupled) {
      plan.emplace(kernel);
      if (c.dyson.use_lowrank_for_pair)
        pair_kernel = kernel;
      else
        lags = dyson::correlation_lags(bath::CorrelationFunction(modes, c.bath), n_steps, dt);
    }
  }

  std::vector<OverlapTable> tables(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) {
    const auto ud = static_cast<std::size_t>(d);
    const auto& pa = phase.p_axes[ud];
    const auto& qa = phase.q_axes[ud];
    tables[ud].nq = qa.count();
    tables[ud].values.resize(pa.count() * qa.count());
    for (std::size_t ip = 0; ip < pa.count(); ++ip)
      for (std::size_t iq = 0; iq < qa.count(); ++iq)
        tables[ud].values[ip * qa.count() + iq] =
            fga::fbi_axis_overlap(psi0.factors()[ud], pa[ip], qa[iq], grid.y_axes[ud], eps);
  }

  std::vector<std::size_t> extent;
  for (const auto& a : grid.x_axes) extent.push_back(a.count());
  auto acc = std::make_shared<dyson::DysonAccumulator>(layout, extent);

  const std::size_t total = phase.size();
  const std::size_t block = c.execution.block_size;
  const double weight = phase.weight();
  const dyson::CouplingIntegrals zero_integrals{rank, D, std::vector<complex>(rank * static_cast<std::size_t>(D))};
  result.trajectories = total;

  spdlog::info("run {}: {} trajectories, {} steps, {} fields on {} grid points, {} worker(s)",
               c.run_id(), total, n_steps, layout.field_count(), grid.x_size(), workers);

  // Honour the requested worker count even above the hardware concurrency.
  tbb::global_control threads(tbb::global_control::max_allowed_parallelism, workers);
  tbb::task_arena arena(static_cast<int>(workers));
  std::size_t next_report = total / 10;
  for (std::size_t start = 0; start < total; start += block) {
    const std::size_t len = std::min(block, total - start);
    std::vector<dyson::TrajectoryContribution> contributions(len);
    std::vector<char> dropped(len, 0);

    auto work = [&](std::size_t i) {
      const std::size_t k = start + i;
      const auto point = phase.point(k);
      fga::TrajectoryHistory history;
      try {
        history = fga::evolve(point, veff, n_steps, dt);
      } catch (const fga::SingularTrajectory& e) {
        dropped[i] = 1;
        spdlog::warn("trajectory {} dropped: {}", k, e.what());
        return;
      }
      complex overlap = psi0.prefactor();
      for (int d = 0; d < D; ++d) {
        const auto [ip, iq] = phase.axis_indices(k, d);
        const auto& t = tables[static_cast<std::size_t>(d)];
        overlap *= t.values[ip * t.nq + iq];
      }
      auto& out = contributions[i];
      out.packet = fga::packet_factors(history.final, overlap, grid.x_axes, eps,
                                       c.grid.window_cutoff);
      complex pair = 0.0;
      dyson::CouplingIntegrals integrals = zero_integrals;
      if (coupled) {
        integrals = plan->integrate(history.q_samples);
        pair = c.dyson.use_lowrank_for_pair
                   ? dyson::pair_integral(history.q_samples, *pair_kernel, dt)
                   : dyson::pair_integral(history.q_samples, lags, dt);
      }
      out.coefficients =
          dyson::field_coefficients(layout, out.packet.coefficient, weight, integrals, pair);
    };

    arena.execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, len),
                        [&](const tbb::blocked_range<std::size_t>& r) {
                          for (std::size_t i = r.begin(); i != r.end(); ++i) work(i);
                        });
    });

    std::vector<dyson::TrajectoryContribution> kept;
    kept.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (dropped[i]) {
        ++result.dropped;
        continue;
      }
      kept.push_back(std::move(contributions[i]));
    }
    arena.execute([&] { acc->accumulate_block(kept, workers > 1); });

    if (options.progress && start + len >= next_report && total >= 10) {
      spdlog::info("  {}/{} trajectories", start + len, total);
      next_report += total / 10;
    }
  }

  if (static_cast<double>(result.dropped) > c.execution.max_dropped_fraction * static_cast<double>(total))
    throw NumericError("dropped " + std::to_string(result.dropped) + " of " +
                       std::to_string(total) + " trajectories (singular Z)");

  result.accumulator = acc;
  const auto assembled = result.assemble(nbar, rank);
  result.rho = assembled.rho;
  result.max_imag_residue = assembled.max_imag_residue;
  if (assembled.max_imag_residue > 1e-8 * assembled.max_abs)
    spdlog::warn("assembly: imaginary residue {:.3e} exceeds 1e-8 of max |rho| = {:.3e}",
                 assembled.max_imag_residue, assembled.max_abs);
  result.density_integral = io::integral(result.rho, result.x_axes);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  spdlog::info("run {}: integral of density {:.10f}, dropped {}, {:.1f} s", c.run_id(),
               result.density_integral, result.dropped, result.wall_seconds);
  return result;
}

io::Header density_header(const RunResult& result, unsigned nbar) {
  io::Header h = result.config.content_keys();
  h.emplace_back("result.run_id", result.config.run_id());
  h.emplace_back("result.nbar", std::to_string(nbar));
  h.emplace_back("result.trajectories", std::to_string(result.trajectories));
  h.emplace_back("result.dropped", std::to_string(result.dropped));
  h.emplace_back("result.frobenius_error", config::format_double(result.frobenius_error));
  return h;
}

std::string meta_text(const RunResult& result) {
  std::string out = config::to_ini(result.config);
  out += "\n[result]\n";
  out += "run_id = " + result.config.run_id() + "\n";
  out += "trajectories = " + std::to_string(result.trajectories) + "\n";
  out += "dropped = " + std::to_string(result.dropped) + "\n";
  out += "density_integral = " + config::format_double(result.density_integral) + "\n";
  out += "max_imag_residue = " + config::format_double(result.max_imag_residue) + "\n";
  out += "frobenius_error = " + config::format_double(result.frobenius_error) + "\n";
  out += "workers = " + std::to_string(result.workers) + "\n";
  out += "wall_seconds = " + config::format_double(result.wall_seconds) + "\n";
  return out;
}

std::string write_outputs(const RunResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const auto& c = result.config;
  const fs::path base = fs::path(directory) / c.output.name;

  auto write_one = [&](const std::string& path, unsigned nbar, const std::vector<double>& rho) {
    auto header = density_header(result, nbar);
    header.emplace_back("result.density_integral",
                        config::format_double(io::integral(rho, result.x_axes)));
    io::write_text(path, io::format_density(header, result.x_axes, rho));
  };

  const std::string primary = base.string() + ".csv";
  write_one(primary, c.dyson.nbar, result.rho);
  io::write_text(base.string() + ".meta", meta_text(result));
  if (c.output.all_orders) {
    const std::size_t rank = c.dyson.nbar > 0 ? c.dyson.rank : 1;
    for (unsigned k = 0; k < c.dyson.nbar; ++k)
      write_one(base.string() + "_nbar" + std::to_string(k) + ".csv", k,
                result.assemble(k, rank).rho);
  }
  return primary;
}

}  // namespace calsim::runner
