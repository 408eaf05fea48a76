// calsim — command-line front end.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "calsim/bath.hpp"
#include "calsim/config.hpp"
#include "calsim/density_io.hpp"
#include "calsim/runner.hpp"
#include "calsim/verify.hpp"

using namespace calsim;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kMemory = 4 };

std::optional<std::size_t> env_workers() {
  const char* v = std::getenv("CALSIM_WORKERS");
  if (!v || !*v) return std::nullopt;
  try {
    const long n = std::stol(v);
    if (n < 1) throw std::invalid_argument("");
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ConfigError("CALSIM_WORKERS: expected a positive integer, got '" + std::string(v) + "'");
  }
}

int cmd_run(const std::string& path, const std::string& output, std::optional<std::size_t> workers) {
  auto cfg = config::load_config(path);
  if (auto env = env_workers()) workers = env;
  if (workers) cfg.execution.workers = *workers;
  const std::string dir = output.empty() ? cfg.output.directory : output;
  if (!output.empty()) cfg.output.directory = output;
  const auto result = runner::run(cfg);
  const auto file = runner::write_outputs(result, dir);
  std::printf("wrote %s\nintegral of density: %.10f\ndropped trajectories: %zu\n", file.c_str(),
              result.density_integral, result.dropped);
  return kOk;
}

int cmd_bath(const std::string& path) {
  const auto cfg = config::load_config(path);
  const auto modes = bath::ohmic_modes(cfg.bath);
  std::printf("%6s %22s %22s\n", "l", "omega_l", "c_l");
  for (std::size_t l = 0; l < modes.omegas.size(); ++l)
    std::printf("%6zu %22.15e %22.15e\n", l + 1, modes.omegas[l], modes.couplings[l]);
  std::printf("omega_L - omega_max = %.3e\n", modes.omegas.back() - cfg.bath.omega_max);
  const complex b0 = bath::correlation_function(modes, cfg.bath, 0.0);
  std::printf("B(0) = %.15e %+.15ei\n", b0.real(), b0.imag());
  std::printf("quadratic shift = %.15e\n", potentials::quadratic_shift(modes));
  if (modes.decoupled()) {
    std::printf("bath decoupled (xi = 0): correlation matrix vanishes\n");
    return kOk;
  }
  const auto matrix =
      bath::correlation_matrix(modes, cfg.bath, cfg.time.n_steps(), cfg.time.dt);
  const auto spectrum = bath::decompose(matrix);
  const auto& ev = spectrum.eigenvalues;
  const double largest = std::abs(ev(0));
  Eigen::Index numerical_rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > 1e-12 * largest) ++numerical_rank;
  std::printf("correlation matrix: size %zu, ||B||_F = %.6e, residual %.3e\n", matrix.size(),
              spectrum.matrix_norm, spectrum.residual);
  std::printf("  largest |lambda| %.6e, smallest |lambda| %.6e, numerical rank (1e-12) %ld\n",
              largest, std::abs(ev(ev.size() - 1)), static_cast<long>(numerical_rank));
  return kOk;
}

int cmd_lowrank(const std::string& path, std::vector<std::size_t> ranks) {
  const auto cfg = config::load_config(path);
  const auto modes = bath::ohmic_modes(cfg.bath);
  const auto matrix = bath::correlation_matrix(modes, cfg.bath, cfg.time.n_steps(), cfg.time.dt);
  const auto spectrum = bath::decompose(matrix);
  std::sort(ranks.begin(), ranks.end());
  std::printf("%6s %22s %22s\n", "rank", "||B_LR - B||_F", "discarded norm");
  for (auto r : ranks) {
    const auto k = bath::truncate(spectrum, r);
    const double direct = (k.reconstruct() - matrix.entries).norm();
    std::printf("%6zu %22.6e %22.6e\n", r, direct, k.frobenius_error);
  }
  return kOk;
}

int cmd_diff(const std::string& a, const std::string& b) {
  const auto d = io::diff(io::read_density(a), io::read_density(b));
  std::printf("L2 difference:  %.17g\nmax difference: %.17g\n", d.l2, d.max);
  return kOk;
}

int cmd_verify() {
  bool ok = true;
  for (const auto& r : verify::run_all()) {
    std::printf("%s\n", verify::format_row(r).c_str());
    ok = ok && r.passed;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced density of a particle coupled to a harmonic bath"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path, output_dir;
  std::optional<std::size_t> workers;
  auto* run = app.add_subcommand("run", "Compute the density for a configuration");
  run->add_option("-c,--config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output_dir, "Output directory (overrides output.directory)");
  run->add_option("-w,--workers", workers, "Worker threads (CALSIM_WORKERS overrides)")->check(CLI::PositiveNumber);

  std::string bath_config;
  auto* bath_cmd = app.add_subcommand("bath", "Print bath modes and correlation summary");
  bath_cmd->add_option("-c,--config", bath_config, "INI configuration")->required()->check(CLI::ExistingFile);

  std::string lr_config;
  std::vector<std::size_t> ranks{5, 10, 20, 40};
  auto* lowrank = app.add_subcommand("lowrank", "Frobenius error of truncated decompositions");
  lowrank->add_option("-c,--config", lr_config, "INI configuration")->required()->check(CLI::ExistingFile);
  lowrank->add_option("-r,--ranks", ranks, "Comma-separated ranks")->delimiter(',');

  std::string file_a, file_b;
  auto* diff = app.add_subcommand("diff", "L2 and max difference of two density files");
  diff->add_option("a", file_a)->required()->check(CLI::ExistingFile);
  diff->add_option("b", file_b)->required()->check(CLI::ExistingFile);

  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) return cmd_run(config_path, output_dir, workers);
    if (*bath_cmd) return cmd_bath(bath_config);
    if (*lowrank) return cmd_lowrank(lr_config, ranks);
    if (*diff) return cmd_diff(file_a, file_b);
    if (*verify_cmd) return cmd_verify();
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const runner::MemoryRefusal& e) {
    spdlog::error("{}", e.what());
    return kMemory;
  } catch (const NumericError& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kFailure;
}
