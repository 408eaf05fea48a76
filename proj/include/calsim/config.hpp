// config.hpp — run configuration: INI parsing, validation and canonical echo.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "calsim/bath.hpp"
#include "calsim/dyson.hpp"
#include "calsim/fga.hpp"
#include "calsim/potentials.hpp"
#include "calsim/wavefunction.hpp"

namespace calsim::config {

struct SystemConfig {
  int dimension{1};
  double epsilon{1.0 / 64.0};
  potentials::PotentialKind potential{potentials::PotentialKind::harmonic};
  potentials::DoubleSlitParameters slit;
  std::string initial{"gaussian"};      // gaussian | double_well_pair | double_slit | product
  std::vector<std::string> factors;     // per-axis kinds when initial = product
  std::vector<double> gaussian_center;  // per axis, for gaussian factors
  std::vector<double> gaussian_momentum;
  // Double-slit source packet; q1 defaults to d1 + b + w/2.
  std::optional<double> slit_q1;
  double slit_q2{-1.0};
  double slit_p1{0.0};
  double slit_p2{8.0};
};

struct GridConfig {
  std::vector<double> p_min, p_max, q_min, q_max;
  double dp{1.0 / 32.0};
  double dq{1.0 / 32.0};
  std::vector<double> x_min, x_max, dx;
  std::vector<double> y_min, y_max, dy;  // empty: derived from the q grid
  double window_cutoff{1e-16};
};

struct TimeConfig {
  double t_final{2.0};
  double dt{1e-3};
  std::size_t n_steps() const;
};

struct DysonConfig {
  unsigned nbar{0};
  std::size_t rank{20};
  bool use_lowrank_for_pair{false};
  dyson::Truncation truncation{dyson::Truncation::arcs};
};

struct OutputConfig {
  std::string directory{"."};
  std::string name{"density"};
  bool all_orders{false};  // also write densities for every lower order
};

struct ExecutionConfig {
  std::size_t workers{1};
  double memory_budget_mb{2048.0};
  std::size_t block_size{64};
  double max_dropped_fraction{0.01};
};

struct RunConfig {
  SystemConfig system;
  bath::BathParameters bath;
  GridConfig grid;
  TimeConfig time;
  DysonConfig dyson;
  OutputConfig output;
  ExecutionConfig execution;

  /// Throws ConfigError with the offending key path.
  void validate() const;

  /// Every key as (section.key, value) in a fixed order with normalised values.
  std::vector<std::pair<std::string, std::string>> canonical() const;
  /// Keys that describe the computed density (drops workers and output location).
  std::vector<std::pair<std::string, std::string>> content_keys() const;
  /// FNV-1a 64 of content_keys(), hex.
  std::string run_id() const;

  potentials::PotentialModel potential_model() const;
  InitialWavefunction initial_wavefunction() const;
  fga::PhaseSpaceGrid phase_space_grid() const;
  fga::SpatialGrid spatial_grid() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// INI text with every canonical key, suitable for parse_config.
std::string to_ini(const RunConfig& config);

/// Shortest round-trip decimal form.
std::string format_double(double v);
/// Fixed 17-significant-digit form used for density rows.
std::string format_double17(double v);

}  // namespace calsim::config
