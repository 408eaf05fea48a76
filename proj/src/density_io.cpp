#include "calsim/density_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>

#include "calsim/config.hpp"

namespace calsim::io {

const std::string* DensityFile::find(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return &v;
  return nullptr;
}

std::string format_density(const Header& header, const std::vector<fga::AxisGrid>& x_axes,
                           const std::vector<double>& rho) {
  std::string out;
  for (const auto& [k, v] : header) out += "# " + k + "=" + v + "\n";
  for (std::size_t d = 0; d < x_axes.size(); ++d) out += "x" + std::to_string(d + 1) + ",";
  out += "rho\n";

  const std::size_t D = x_axes.size();
  std::vector<std::size_t> extent(D);
  std::size_t total = 1;
  for (std::size_t d = 0; d < D; ++d) total *= (extent[d] = x_axes[d].count());
  if (rho.size() != total) throw std::invalid_argument("format_density: size mismatch");

  std::vector<std::size_t> idx(D, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t d = D; d-- > 0;) {
      idx[d] = rem % extent[d];
      rem /= extent[d];
    }
    for (std::size_t d = 0; d < D; ++d) out += config::format_double17(x_axes[d][idx[d]]) + ",";
    out += config::format_double17(rho[flat]) + "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output: cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("output: write failed for '" + path + "'");
}

std::vector<fga::AxisGrid> axes_from_header(const Header& header) {
  auto get = [&](const std::string& key) -> std::vector<double> {
    for (const auto& [k, v] : header) {
      if (k != key) continue;
      std::vector<std::string> parts;
      boost::algorithm::split(parts, v, boost::is_any_of(","));
      std::vector<double> out;
      for (auto& p : parts) out.push_back(std::stod(boost::algorithm::trim_copy(p)));
      return out;
    }
    throw ConfigError("density file: header lacks " + key);
  };
  const auto lo = get("grid.x_min");
  const auto hi = get("grid.x_max");
  const auto dx = get("grid.dx");
  if (lo.size() != hi.size() || lo.size() != dx.size())
    throw ConfigError("density file: inconsistent grid header");
  std::vector<fga::AxisGrid> axes;
  for (std::size_t d = 0; d < lo.size(); ++d) axes.push_back({lo[d], hi[d], dx[d]});
  return axes;
}

DensityFile parse_density(const std::string& text) {
  DensityFile file;
  std::istringstream in(text);
  std::string line;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      file.header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    if (!columns_seen) {
      columns_seen = true;
      continue;
    }
    std::vector<std::string> parts;
    boost::algorithm::split(parts, line, boost::is_any_of(","));
    if (parts.size() < 2) throw ConfigError("density file: malformed row '" + line + "'");
    std::vector<double> xs;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) xs.push_back(std::stod(parts[i]));
    file.coords.push_back(std::move(xs));
    file.rho.push_back(std::stod(parts.back()));
  }
  file.x_axes = axes_from_header(file.header);
  std::size_t total = 1;
  for (const auto& a : file.x_axes) total *= a.count();
  if (total != file.rho.size())
    throw ConfigError("density file: row count does not match the grid header");
  return file;
}

DensityFile read_density(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("density file: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_density(buffer.str());
}

double l2_difference(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<fga::AxisGrid>& axes) {
  if (a.size() != b.size()) throw std::invalid_argument("l2_difference: size mismatch");
  double cell = 1.0;
  for (const auto& ax : axes) cell *= ax.step;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum * cell);
}

double integral(const std::vector<double>& rho, const std::vector<fga::AxisGrid>& axes) {
  double cell = 1.0;
  for (const auto& ax : axes) cell *= ax.step;
  double sum = 0.0;
  for (double r : rho) sum += r;
  return sum * cell;
}

DensityDiff diff(const DensityFile& a, const DensityFile& b) {
  if (a.x_axes.size() != b.x_axes.size()) throw ConfigError("diff: grid dimensions differ");
  for (std::size_t d = 0; d < a.x_axes.size(); ++d) {
    const auto& x = a.x_axes[d];
    const auto& y = b.x_axes[d];
    if (x.count() != y.count() || std::abs(x.min - y.min) > 1e-12 || std::abs(x.step - y.step) > 1e-12)
      throw ConfigError("diff: grids differ on axis " + std::to_string(d + 1));
  }
  DensityDiff out;
  out.l2 = l2_difference(a.rho, b.rho, a.x_axes);
  for (std::size_t i = 0; i < a.rho.size(); ++i)
    out.max = std::max(out.max, std::abs(a.rho[i] - b.rho[i]));
  return out;
}

}  // namespace calsim::io
