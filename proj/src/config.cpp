#include "calsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace calsim::config {

namespace pt = boost::property_tree;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string format_double17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

namespace {

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& values) {
  return boost::algorithm::join(values, ", ");
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) boost::algorithm::trim(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(key + ": must be finite");
  return v;
}

// Accepts plain numbers and simple fractions "a/b" (e.g. 1/64).
double parse_number(const std::string& key, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_double(key, text);
  const double num = parse_double(key, text.substr(0, slash));
  const double den = parse_double(key, text.substr(slash + 1));
  if (den == 0.0) throw ConfigError(key + ": division by zero");
  return num / den;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  std::size_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text)) out.push_back(parse_number(key, part));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

// Broadcasts a single value to `dim` axes; otherwise requires exactly `dim` entries.
std::vector<double> per_axis(const std::string& key, std::vector<double> values, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  if (values.size() == 1 && d > 1) values.assign(d, values[0]);
  if (values.size() != d)
    throw ConfigError(key + ": expected " + std::to_string(dim) + " values, got " +
                      std::to_string(values.size()));
  return values;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.dimension", "system.epsilon", "system.potential", "system.slit_height",
      "system.slit_offset", "system.slit_half_thickness", "system.slit_width",
      "system.slit_buffer", "system.initial", "system.factors", "system.gaussian_center",
      "system.gaussian_momentum", "system.slit_q1", "system.slit_q2", "system.slit_p1",
      "system.slit_p2", "bath.modes", "bath.omega_max", "bath.omega_c", "bath.beta", "bath.xi",
      "grid.p_min", "grid.p_max", "grid.q_min", "grid.q_max", "grid.dp", "grid.dq", "grid.x_min",
      "grid.x_max", "grid.dx", "grid.y_min", "grid.y_max", "grid.dy", "grid.window_cutoff",
      "time.t_final", "time.dt", "dyson.nbar", "dyson.rank", "dyson.use_lowrank_for_pair",
      "dyson.truncation", "output.directory", "output.name", "output.all_orders",
      "execution.workers", "execution.memory_budget_mb", "execution.block_size",
      "execution.max_dropped_fraction"};
  return keys;
}

}  // namespace

std::size_t TimeConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::map<std::string, std::string> values;
  for (const auto& [section, body] : tree) {
    if (section == "result") continue;  // written by runs; ignored on re-read
    if (body.empty()) throw ConfigError(section + ": top-level keys must be inside a section");
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      if (!known_keys().count(path)) throw ConfigError(path + ": unknown key");
      values[path] = node.get_value<std::string>();
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  RunConfig c;
  auto& s = c.system;
  if (auto v = get("system.dimension")) s.dimension = static_cast<int>(parse_size("system.dimension", *v));
  if (auto v = get("system.epsilon")) s.epsilon = parse_number("system.epsilon", *v);
  if (auto v = get("system.potential")) s.potential = potentials::parse_kind(boost::algorithm::trim_copy(*v));
  if (auto v = get("system.slit_height")) s.slit.height = parse_number("system.slit_height", *v);
  if (auto v = get("system.slit_offset")) s.slit.slit_offset = parse_number("system.slit_offset", *v);
  if (auto v = get("system.slit_half_thickness")) s.slit.half_thickness = parse_number("system.slit_half_thickness", *v);
  if (auto v = get("system.slit_width")) s.slit.slit_width = parse_number("system.slit_width", *v);
  if (auto v = get("system.slit_buffer")) s.slit.buffer = parse_number("system.slit_buffer", *v);
  if (auto v = get("system.initial")) s.initial = boost::algorithm::trim_copy(*v);
  if (auto v = get("system.factors")) s.factors = split(*v);
  if (auto v = get("system.gaussian_center")) s.gaussian_center = parse_list("system.gaussian_center", *v);
  if (auto v = get("system.gaussian_momentum")) s.gaussian_momentum = parse_list("system.gaussian_momentum", *v);
  if (auto v = get("system.slit_q1")) s.slit_q1 = parse_number("system.slit_q1", *v);
  if (auto v = get("system.slit_q2")) s.slit_q2 = parse_number("system.slit_q2", *v);
  if (auto v = get("system.slit_p1")) s.slit_p1 = parse_number("system.slit_p1", *v);
  if (auto v = get("system.slit_p2")) s.slit_p2 = parse_number("system.slit_p2", *v);
  if (s.dimension < 1 || s.dimension > kMaxDimension)
    throw ConfigError("system.dimension: must lie in [1, 3]");
  const int D = s.dimension;
  if (s.gaussian_center.empty()) s.gaussian_center = {0.0};
  if (s.gaussian_momentum.empty()) s.gaussian_momentum = {0.0};
  s.gaussian_center = per_axis("system.gaussian_center", s.gaussian_center, D);
  s.gaussian_momentum = per_axis("system.gaussian_momentum", s.gaussian_momentum, D);
  if (!s.slit_q1) s.slit_q1 = s.slit.slit_offset + s.slit.buffer + 0.5 * s.slit.slit_width;

  auto& b = c.bath;
  if (auto v = get("bath.modes")) b.mode_count = parse_size("bath.modes", *v);
  if (auto v = get("bath.omega_max")) b.omega_max = parse_number("bath.omega_max", *v);
  if (auto v = get("bath.omega_c")) b.omega_c = parse_number("bath.omega_c", *v);
  if (auto v = get("bath.beta")) b.beta = parse_number("bath.beta", *v);
  if (auto v = get("bath.xi")) b.xi = parse_number("bath.xi", *v);
  b.epsilon = s.epsilon;

  auto& g = c.grid;
  auto axis_list = [&](const std::string& key, double fallback) {
    const auto v = get(key);
    return per_axis(key, v ? parse_list(key, *v) : std::vector<double>{fallback}, D);
  };
  g.p_min = axis_list("grid.p_min", -2.0);
  g.p_max = axis_list("grid.p_max", 2.0);
  g.q_min = axis_list("grid.q_min", -2.0);
  g.q_max = axis_list("grid.q_max", 2.0);
  if (auto v = get("grid.dp")) g.dp = parse_number("grid.dp", *v);
  if (auto v = get("grid.dq")) g.dq = parse_number("grid.dq", *v);
  g.x_min = axis_list("grid.x_min", -2.0);
  g.x_max = axis_list("grid.x_max", 2.0);
  g.dx = axis_list("grid.dx", 1.0 / 64.0);
  const bool has_y = get("grid.y_min") || get("grid.y_max") || get("grid.dy");
  if (has_y) {
    if (!(get("grid.y_min") && get("grid.y_max") && get("grid.dy")))
      throw ConfigError("grid.y_min: y grid needs y_min, y_max and dy together");
    g.y_min = axis_list("grid.y_min", 0.0);
    g.y_max = axis_list("grid.y_max", 0.0);
    g.dy = axis_list("grid.dy", 0.0);
  }
  if (auto v = get("grid.window_cutoff")) g.window_cutoff = parse_number("grid.window_cutoff", *v);

  if (auto v = get("time.t_final")) c.time.t_final = parse_number("time.t_final", *v);
  if (auto v = get("time.dt")) c.time.dt = parse_number("time.dt", *v);

  if (auto v = get("dyson.nbar")) c.dyson.nbar = static_cast<unsigned>(parse_size("dyson.nbar", *v));
  if (auto v = get("dyson.rank")) c.dyson.rank = parse_size("dyson.rank", *v);
  if (auto v = get("dyson.use_lowrank_for_pair")) c.dyson.use_lowrank_for_pair = parse_bool("dyson.use_lowrank_for_pair", *v);
  if (auto v = get("dyson.truncation")) c.dyson.truncation = dyson::parse_truncation(boost::algorithm::trim_copy(*v));

  if (auto v = get("output.directory")) c.output.directory = boost::algorithm::trim_copy(*v);
  if (auto v = get("output.name")) c.output.name = boost::algorithm::trim_copy(*v);
  if (auto v = get("output.all_orders")) c.output.all_orders = parse_bool("output.all_orders", *v);

  if (auto v = get("execution.workers")) c.execution.workers = parse_size("execution.workers", *v);
  if (auto v = get("execution.memory_budget_mb")) c.execution.memory_budget_mb = parse_number("execution.memory_budget_mb", *v);
  if (auto v = get("execution.block_size")) c.execution.block_size = parse_size("execution.block_size", *v);
  if (auto v = get("execution.max_dropped_fraction")) c.execution.max_dropped_fraction = parse_number("execution.max_dropped_fraction", *v);

  // Resolve the default y grid so the echo is self-contained.
  if (!has_y) {
    for (int d = 0; d < D; ++d) {
      const auto ud = static_cast<std::size_t>(d);
      const fga::AxisGrid q{g.q_min[ud], g.q_max[ud], g.dq};
      const auto y = fga::default_y_axis(q, s.epsilon);
      g.y_min.push_back(y.min);
      g.y_max.push_back(y.max);
      g.dy.push_back(y.step);
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void RunConfig::validate() const {
  const int D = system.dimension;
  if (D < 1 || D > kMaxDimension) throw ConfigError("system.dimension: must lie in [1, 3]");
  if (!(system.epsilon > 0.0)) throw ConfigError("system.epsilon: must be > 0");
  bath.validate();
  if (bath.epsilon != system.epsilon) throw ConfigError("bath: epsilon must equal system.epsilon");

  using potentials::PotentialKind;
  if (system.potential == PotentialKind::double_well && D != 1)
    throw ConfigError("system.potential: double_well requires dimension 1");
  if (system.potential == PotentialKind::double_slit && D != 2)
    throw ConfigError("system.potential: double_slit requires dimension 2");
  if (system.potential == PotentialKind::custom)
    throw ConfigError("system.potential: custom potentials are only available through the library");

  const auto& init = system.initial;
  if (init == "double_well_pair" && D != 1)
    throw ConfigError("system.initial: double_well_pair requires dimension 1");
  if (init == "double_slit" && D != 2)
    throw ConfigError("system.initial: double_slit requires dimension 2");
  if (init == "product") {
    if (system.factors.size() != static_cast<std::size_t>(D))
      throw ConfigError("system.factors: need one factor per dimension");
    for (const auto& f : system.factors)
      if (f != "gaussian" && f != "double_well_pair")
        throw ConfigError("system.factors: unknown factor '" + f + "'");
  } else if (init != "gaussian" && init != "double_well_pair" && init != "double_slit") {
    throw ConfigError("system.initial: unknown kind '" + init + "'");
  }

  const auto ud = static_cast<std::size_t>(D);
  for (const auto* v : {&grid.p_min, &grid.p_max, &grid.q_min, &grid.q_max, &grid.x_min,
                        &grid.x_max, &grid.dx, &grid.y_min, &grid.y_max, &grid.dy})
    if (v->size() != ud) throw ConfigError("grid: every per-axis list needs " + std::to_string(D) + " values");
  phase_space_grid();
  spatial_grid().validate();
  if (!(grid.window_cutoff >= 0.0 && grid.window_cutoff < 1.0))
    throw ConfigError("grid.window_cutoff: must lie in [0, 1)");

  if (!(time.dt > 0.0)) throw ConfigError("time.dt: must be > 0");
  if (!(time.t_final >= 0.0)) throw ConfigError("time.t_final: must be >= 0");
  const double steps = time.t_final / time.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("time.t_final: must be an integer multiple of time.dt");

  if (dyson.nbar > 0) {
    if (dyson.rank < 1 || dyson.rank > time.n_steps() + 1)
      throw ConfigError("dyson.rank: must lie in [1, N_t + 1]");
  }
  if (dyson.nbar > 12) throw ConfigError("dyson.nbar: must be <= 12");

  if (execution.workers < 1) throw ConfigError("execution.workers: must be >= 1");
  if (execution.block_size < 1) throw ConfigError("execution.block_size: must be >= 1");
  if (!(execution.memory_budget_mb > 0.0)) throw ConfigError("execution.memory_budget_mb: must be > 0");
  if (!(execution.max_dropped_fraction >= 0.0 && execution.max_dropped_fraction <= 1.0))
    throw ConfigError("execution.max_dropped_fraction: must lie in [0, 1]");
  if (output.name.empty()) throw ConfigError("output.name: must not be empty");
}

std::vector<std::pair<std::string, std::string>> RunConfig::canonical() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  const auto& s = system;
  put("system.dimension", std::to_string(s.dimension));
  put("system.epsilon", format_double(s.epsilon));
  put("system.potential", potentials::to_string(s.potential));
  put("system.slit_height", format_double(s.slit.height));
  put("system.slit_offset", format_double(s.slit.slit_offset));
  put("system.slit_half_thickness", format_double(s.slit.half_thickness));
  put("system.slit_width", format_double(s.slit.slit_width));
  put("system.slit_buffer", format_double(s.slit.buffer));
  put("system.initial", s.initial);
  if (!s.factors.empty()) put("system.factors", join(s.factors));
  put("system.gaussian_center", join(s.gaussian_center));
  put("system.gaussian_momentum", join(s.gaussian_momentum));
  put("system.slit_q1", format_double(s.slit_q1.value_or(0.0)));
  put("system.slit_q2", format_double(s.slit_q2));
  put("system.slit_p1", format_double(s.slit_p1));
  put("system.slit_p2", format_double(s.slit_p2));
  put("bath.modes", std::to_string(bath.mode_count));
  put("bath.omega_max", format_double(bath.omega_max));
  put("bath.omega_c", format_double(bath.omega_c));
  put("bath.beta", format_double(bath.beta));
  put("bath.xi", format_double(bath.xi));
  put("grid.p_min", join(grid.p_min));
  put("grid.p_max", join(grid.p_max));
  put("grid.q_min", join(grid.q_min));
  put("grid.q_max", join(grid.q_max));
  put("grid.dp", format_double(grid.dp));
  put("grid.dq", format_double(grid.dq));
  put("grid.x_min", join(grid.x_min));
  put("grid.x_max", join(grid.x_max));
  put("grid.dx", join(grid.dx));
  put("grid.y_min", join(grid.y_min));
  put("grid.y_max", join(grid.y_max));
  put("grid.dy", join(grid.dy));
  put("grid.window_cutoff", format_double(grid.window_cutoff));
  put("time.t_final", format_double(time.t_final));
  put("time.dt", format_double(time.dt));
  put("dyson.nbar", std::to_string(dyson.nbar));
  put("dyson.rank", std::to_string(dyson.rank));
  put("dyson.use_lowrank_for_pair", dyson.use_lowrank_for_pair ? "true" : "false");
  put("dyson.truncation", dyson::to_string(dyson.truncation));
  put("output.directory", output.directory);
  put("output.name", output.name);
  put("output.all_orders", output.all_orders ? "true" : "false");
  put("execution.workers", std::to_string(execution.workers));
  put("execution.memory_budget_mb", format_double(execution.memory_budget_mb));
  put("execution.block_size", std::to_string(execution.block_size));
  put("execution.max_dropped_fraction", format_double(execution.max_dropped_fraction));
  return kv;
}

std::vector<std::pair<std::string, std::string>> RunConfig::content_keys() const {
  std::vector<std::pair<std::string, std::string>> kv;
  for (auto& entry : canonical()) {
    const auto& k = entry.first;
    if (k == "execution.workers" || k == "output.directory" || k == "output.name") continue;
    kv.push_back(std::move(entry));
  }
  return kv;
}

std::string RunConfig::run_id() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : content_keys()) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

potentials::PotentialModel RunConfig::potential_model() const {
  using potentials::PotentialKind;
  switch (system.potential) {
    case PotentialKind::harmonic: return potentials::PotentialModel::harmonic(system.dimension);
    case PotentialKind::double_well: return potentials::PotentialModel::double_well();
    case PotentialKind::double_slit: return potentials::PotentialModel::double_slit(system.slit);
    case PotentialKind::custom: break;
  }
  throw ConfigError("system.potential: custom potentials are only available through the library");
}

InitialWavefunction RunConfig::initial_wavefunction() const {
  const auto& s = system;
  const double eps = s.epsilon;
  if (s.initial == "double_well_pair") return InitialWavefunction::double_well_pair(eps);
  if (s.initial == "double_slit")
    return InitialWavefunction::double_slit(eps, s.slit_q1.value_or(0.0), s.slit_q2, s.slit_p1,
                                            s.slit_p2);
  std::vector<InitialWavefunction> axes;
  for (int d = 0; d < s.dimension; ++d) {
    const auto ud = static_cast<std::size_t>(d);
    const std::string kind = s.initial == "product" ? s.factors[ud] : s.initial;
    if (kind == "double_well_pair")
      axes.push_back(InitialWavefunction::double_well_pair(eps));
    else
      axes.push_back(InitialWavefunction::gaussian(eps, s.gaussian_center[ud], s.gaussian_momentum[ud]));
  }
  if (axes.size() == 1) return axes.front();
  return InitialWavefunction::product(axes);
}

fga::PhaseSpaceGrid RunConfig::phase_space_grid() const {
  std::vector<std::pair<double, double>> p, q;
  for (std::size_t d = 0; d < grid.p_min.size(); ++d) {
    p.emplace_back(grid.p_min[d], grid.p_max[d]);
    q.emplace_back(grid.q_min[d], grid.q_max[d]);
  }
  return fga::make_phase_space_grid(p, q, grid.dp, grid.dq);
}

fga::SpatialGrid RunConfig::spatial_grid() const {
  fga::SpatialGrid g;
  for (std::size_t d = 0; d < grid.x_min.size(); ++d) {
    g.x_axes.push_back({grid.x_min[d], grid.x_max[d], grid.dx[d]});
    g.y_axes.push_back({grid.y_min[d], grid.y_max[d], grid.dy[d]});
  }
  return g;
}

std::string to_ini(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& [key, value] : config.canonical()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

}  // namespace calsim::config
