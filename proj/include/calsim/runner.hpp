// runner.hpp — end-to-end density computation for one configuration.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "calsim/bath.hpp"
#include "calsim/config.hpp"
#include "calsim/density_io.hpp"
#include "calsim/dyson.hpp"

namespace calsim::runner {

/// The field storage would exceed execution.memory_budget_mb.
class MemoryRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<std::size_t> workers;  // overrides execution.workers
  /// Reuse a decomposition of the same correlation matrix across runs.
  std::shared_ptr<const bath::SpectralDecomposition> spectrum;
  bool progress{true};
};

struct RunResult {
  config::RunConfig config;
  std::vector<fga::AxisGrid> x_axes;
  std::vector<double> rho;  // at the configured nbar and rank
  double density_integral{0.0};
  double max_imag_residue{0.0};
  std::size_t trajectories{0};
  std::size_t dropped{0};
  double frobenius_error{0.0};
  std::size_t workers{1};
  double wall_seconds{0.0};

  std::shared_ptr<const dyson::DysonAccumulator> accumulator;
  Eigen::VectorXd lambdas;

  /// Re-assemble with lower order and/or rank from the same fields.
  dyson::AssembledDensity assemble(unsigned nbar, std::size_t rank) const;
};

/// Bytes needed for the fields of a configuration (excluding per-block scratch).
double field_bytes(const config::RunConfig& config);

/// Full or zero (decoupled) spectral decomposition of the configured correlation matrix.
std::shared_ptr<const bath::SpectralDecomposition> correlation_spectrum(
    const config::RunConfig& config);

RunResult run(const config::RunConfig& config, const RunOptions& options = {});

/// Header echoed into the density file (no wall time or worker count).
io::Header density_header(const RunResult& result, unsigned nbar);
/// INI text of the configuration plus a [result] section with run statistics.
std::string meta_text(const RunResult& result);

/// Writes <dir>/<name>.csv and <dir>/<name>.meta, plus <name>_nbar<k>.csv for every lower order
/// when output.all_orders is set. Returns the primary CSV path.
std::string write_outputs(const RunResult& result, const std::string& directory);

}  // namespace calsim::runner
