// density_io.hpp — density CSV files and their comparison.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "calsim/fga.hpp"

namespace calsim::io {

using Header = std::vector<std::pair<std::string, std::string>>;

struct DensityFile {
  Header header;
  std::vector<fga::AxisGrid> x_axes;
  std::vector<std::vector<double>> coords;  // one row per grid point
  std::vector<double> rho;

  const std::string* find(const std::string& key) const;
};

/// `# key=value` header lines, a column line, then one row per grid point (last axis fastest).
std::string format_density(const Header& header, const std::vector<fga::AxisGrid>& x_axes,
                           const std::vector<double>& rho);
void write_text(const std::string& path, const std::string& text);

DensityFile parse_density(const std::string& text);
DensityFile read_density(const std::string& path);

/// Grid axes recovered from the echoed grid.x_min / grid.x_max / grid.dx keys.
std::vector<fga::AxisGrid> axes_from_header(const Header& header);

struct DensityDiff {
  double l2{0.0};   // rectangle rule over the grid
  double max{0.0};
};

/// Throws ConfigError if the grids differ.
DensityDiff diff(const DensityFile& a, const DensityFile& b);

/// Rectangle-rule L2 norm of a - b on a tensor grid with the given steps.
double l2_difference(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<fga::AxisGrid>& axes);
double integral(const std::vector<double>& rho, const std::vector<fga::AxisGrid>& axes);

}  // namespace calsim::io
