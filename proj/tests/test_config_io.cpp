#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "calsim/config.hpp"
#include "calsim/density_io.hpp"

using namespace calsim;

namespace {

const char* kMinimal = R"(
[system]
potential = harmonic

[grid]
p_min = -1
p_max = 1
q_min = -1
q_max = 1
dp = 1/8
dq = 1/8
)";

// Minimal config with `line` added to `section`.
std::string with(const std::string& section, const std::string& line) {
  std::string text = kMinimal;
  const std::string tag = "[" + section + "]\n";
  const auto at = text.find(tag);
  if (at == std::string::npos) return text + "\n" + tag + line + "\n";
  return text.insert(at + tag.size(), line + "\n");
}

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults and fractions") {
  const auto c = config::parse_config(kMinimal);
  CHECK(c.system.epsilon == 1.0 / 64.0);
  CHECK(c.grid.dp == 0.125);
  CHECK(c.time.t_final == 2.0);
  CHECK(c.time.dt == 1e-3);
  CHECK(c.time.n_steps() == 2000);
  CHECK(c.dyson.nbar == 0);
  CHECK(c.dyson.truncation == dyson::Truncation::arcs);
  CHECK(c.bath.mode_count == 400);
  CHECK(c.bath.epsilon == c.system.epsilon);
  CHECK(c.execution.workers == 1);
  CHECK(c.phase_space_grid().size() == 17 * 17);
  // The y grid is resolved from the q grid.
  REQUIRE(c.grid.y_min.size() == 1);
  CHECK(c.grid.y_max[0] >= 1.0 + 6.0 * std::sqrt(c.system.epsilon) - 1e-12);
  CHECK(c.grid.dy[0] == doctest::Approx(0.125 / 4.0));
}

TEST_CASE("scalars broadcast over axes") {
  const auto c = config::parse_config(R"(
[system]
dimension = 2
potential = harmonic
gaussian_center = 0.1, -0.2

[grid]
p_min = -1
p_max = 1
q_min = -1, -2
q_max = 1, 0
dp = 1/4
dq = 1/4
x_min = -1
x_max = 1
dx = 1/8
)");
  CHECK(c.grid.q_min == std::vector<double>{-1.0, -2.0});
  CHECK(c.grid.p_max == std::vector<double>{1.0, 1.0});
  CHECK(c.system.gaussian_momentum == std::vector<double>{0.0, 0.0});
  CHECK(c.spatial_grid().x_size() == 17 * 17);
  CHECK(c.initial_wavefunction().dimension() == 2);
  CHECK(c.initial_wavefunction().analytic_norm() == doctest::Approx(1.0));
}

TEST_CASE("validation errors name the key") {
  CHECK(error_of([] { config::parse_config(with("system", "epsilon = 0")); }).find("system.epsilon") == 0);
  CHECK(error_of([] { config::parse_config(with("bath", "colour = red")); }).find("bath.colour") == 0);
  CHECK(error_of([] { config::parse_config(with("time", "dt = 0.3")); }).find("time.t_final") == 0);
  CHECK(error_of([] { config::parse_config(with("time", "dt = x")); }).find("time.dt") == 0);
  CHECK(error_of([] { config::parse_config(with("dyson", "truncation = both")); }).find("dyson.truncation") == 0);
  CHECK(error_of([] { config::parse_config(with("system", "initial = double_slit")); }).find("system.initial") == 0);
  CHECK(error_of([] { config::parse_config(with("output", "all_orders = yes")); }).find("output.all_orders") == 0);
  CHECK(error_of([] { config::parse_config(with("execution", "workers = 0")); }).find("execution.workers") == 0);
  CHECK(error_of([] { config::parse_config(with("system", "dimension = 4")); }).find("system.dimension") == 0);
  CHECK(error_of([] { config::parse_config(with("dyson", "nbar = 2\nrank = 5000")); }).find("dyson.rank") == 0);
  CHECK(error_of([] { config::parse_config(with("system", "epsilon = 1/0")); }).find("system.epsilon") == 0);
  CHECK(error_of([] { config::parse_config(with("grid", "dx = 0.3")); }).find("grid.x") == 0);
  CHECK(error_of([] { config::parse_config(with("system", "initial = custom_table")); }).find("system.initial") == 0);
  CHECK(error_of([] { config::parse_config(with("grid", "y_min = -3")); }).find("grid.y_min") == 0);
  CHECK(error_of([] { config::parse_config("[system]\nepsilon = 1/64\n[grid]\nq_min = -1, 0\n"); }).find("grid.q_min") == 0);
  CHECK(error_of([] { config::parse_config("not an ini ["); }).find("config") == 0);
  CHECK(error_of([] { config::load_config("/nonexistent/run.ini"); }).find("config") == 0);
}

TEST_CASE("canonical echo round-trips") {
  auto c = config::parse_config(with("dyson", "nbar = 2\nrank = 7\ntruncation = printed"));
  c.execution.workers = 3;
  const auto text = config::to_ini(c);
  const auto back = config::parse_config(text);
  CHECK(back.canonical() == c.canonical());
  CHECK(back.run_id() == c.run_id());
  CHECK(back.dyson.truncation == dyson::Truncation::printed);

  // Content keys ignore workers and output location.
  auto d = c;
  d.execution.workers = 8;
  d.output.directory = "/tmp/else";
  d.output.name = "other";
  CHECK(d.run_id() == c.run_id());
  d.dyson.rank = 8;
  CHECK(d.run_id() != c.run_id());
  for (const auto& [k, v] : c.content_keys()) {
    CHECK(k != "execution.workers");
    CHECK(k != "output.name");
  }
  // A [result] section (as written to .meta) is ignored.
  CHECK(config::parse_config(text + "\n[result]\nwall_seconds = 3\n").run_id() == c.run_id());
}

TEST_CASE("number formatting") {
  CHECK(config::format_double(0.1) == "0.1");
  CHECK(config::format_double(1.0 / 64.0) == "0.015625");
  CHECK(std::stod(config::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(config::format_double17(0.1) == "0.10000000000000001");
  CHECK(std::stod(config::format_double17(2.0 / 3.0)) == 2.0 / 3.0);
}

TEST_CASE("density files round-trip") {
  const std::vector<fga::AxisGrid> axes{{-1.0, 1.0, 0.5}, {0.0, 0.25, 0.125}};
  io::Header h{{"grid.x_min", "-1, 0"}, {"grid.x_max", "1, 0.25"}, {"grid.dx", "0.5, 0.125"}, {"note", "a=b"}};
  std::vector<double> rho(15);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 / (1.0 + static_cast<double>(i));
  const auto text = io::format_density(h, axes, rho);
  CHECK(text.find("# grid.x_min=-1, 0\n") == 0);
  CHECK(text.find("x1,x2,rho\n") != std::string::npos);
  const auto f = io::parse_density(text);
  CHECK(f.rho == rho);
  CHECK(f.coords.size() == 15);
  CHECK(f.coords[1] == std::vector<double>{-1.0, 0.125});
  CHECK(f.coords[3] == std::vector<double>{-0.5, 0.0});
  REQUIRE(f.find("note"));
  CHECK(*f.find("note") == "a=b");
  CHECK(f.find("missing") == nullptr);
  CHECK(io::format_density(f.header, f.x_axes, f.rho) == text);

  const auto dir = std::filesystem::temp_directory_path() / "calsim_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "d.csv").string();
  io::write_text(path, text);
  CHECK(io::read_density(path).rho == rho);
  CHECK_THROWS_AS(io::read_density((dir / "none.csv").string()), ConfigError);
  CHECK_THROWS_AS(io::parse_density("# grid.x_min=0\n# grid.x_max=1\n# grid.dx=0.5\nx1,rho\n0,1\n"), ConfigError);
  CHECK_THROWS_AS(io::format_density(h, axes, {1.0}), std::invalid_argument);
}

TEST_CASE("density differences") {
  const std::vector<fga::AxisGrid> axes{{0.0, 1.0, 0.25}};
  const io::Header h{{"grid.x_min", "0"}, {"grid.x_max", "1"}, {"grid.dx", "0.25"}};
  const std::vector<double> a{0.0, 1.0, 2.0, 1.0, 0.0};
  std::vector<double> neg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
  const auto fa = io::parse_density(io::format_density(h, axes, a));
  const auto fn = io::parse_density(io::format_density(h, axes, neg));
  CHECK(io::diff(fa, fa).l2 == 0.0);
  CHECK(io::diff(fa, fa).max == 0.0);
  CHECK(io::diff(fa, fn).max == 4.0);
  // sqrt(0.25 * (4 + 16 + 4)) = sqrt(6)
  CHECK(io::diff(fa, fn).l2 == doctest::Approx(std::sqrt(6.0)));
  CHECK(io::integral(a, axes) == doctest::Approx(1.0));

  const io::Header other{{"grid.x_min", "0"}, {"grid.x_max", "2"}, {"grid.dx", "0.5"}};
  const auto fo = io::parse_density(io::format_density(other, {{0.0, 2.0, 0.5}}, a));
  CHECK_THROWS_AS(io::diff(fa, fo), ConfigError);
}
