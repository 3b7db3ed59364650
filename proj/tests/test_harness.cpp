#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "twophase/harness.hpp"

using namespace twophase;
using support::vec;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text, "test.conf");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("presets") {
  const Scenario t = preset("trivial");
  CHECK(t.cells == 100);
  CHECK(t.X0 == 0.51);
  CHECK(t.dt == 8e-4);
  CHECK(t.t_end == 5.0);
  const ModelParams tp = t.params();
  CHECK(tp.beta_star() == Vec::Ones(3));
  CHECK(tp.kappa(Phase::solid)(0, 1) == 0.2);
  CHECK(tp.kappa(Phase::solid)(1, 2) == 0.1);
  CHECK(tp.kappa(Phase::gas)(0, 2) == 1.0);
  CHECK(tp.kappa_min(Phase::solid) == 0.1);

  const Scenario e = preset("equilibrium");
  CHECK(e.dt == 6e-4);
  CHECK((e.params().beta_star() - vec({1.0 / 6, 4, 4})).norm() < 1e-15);
  CHECK(e.snapshot_times == std::vector<double>{0.0, 0.25, 1.0, 5.0});
  CHECK(preset("non_equilibrium").derived);
  CHECK(preset("equilibrium_nonmonotone").derived);
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("config parsing") {
  const Scenario s = parse_config_text(R"(
# comment
[scenario]
preset = equilibrium
name = custom   # trailing comment
[mesh]
cells = 64
interface = 0.4
[time]
dt = 1e-4
t_end = 0.5
snapshots = 0, 0.25 0.5
[model]
kappa = 0 1/2 1; 1/2 0 0.3; 1 0.3 0
beta_star = 1/6 4 4
)", "inline");
  CHECK(s.name == "custom");
  CHECK(s.cells == 64);
  CHECK(s.X0 == 0.4);
  CHECK(s.dt == 1e-4);
  CHECK(s.snapshot_times == std::vector<double>{0.0, 0.25, 0.5});
  CHECK(s.kappa_s(0, 1) == 0.5);
  CHECK(s.kappa_g(1, 2) == 0.3);
  CHECK(s.mu_star_g[0] == doctest::Approx(std::log(1.0 / 6)));

  CHECK(config_error("[mesh]\ninterface = 1.5\n").find("interface") != std::string::npos);
  CHECK(config_error("[mesh]\ncolour = red\n").find("test.conf:2") != std::string::npos);
  CHECK(config_error("[time]\ndt = fast\n").find("test.conf:2") != std::string::npos);
  CHECK(config_error("[model]\nbeta_star = 1 2 3\nmu_star_s = 0 0 0\n").find("either") != std::string::npos);
  CHECK(config_error("[model]\nkappa = 0 1; 1 0 2\n").find("square") != std::string::npos);
  CHECK(config_error("[scenario]\nmode = fly\n").find("mode") != std::string::npos);
  CHECK(config_error("[mesh\n").find("section") != std::string::npos);
  CHECK(config_error("[mesh]\ncells = 3\n").find("cells") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/file.conf"), ConfigError);
  CHECK_THROWS_AS(load_scenario("no_such_preset"), ConfigError);

  const Scenario u = parse_config_text("[initial]\nprofile = uniform\ncomposition = 0.2 0.3 0.5\n", "u");
  CHECK(u.uniform == vec({0.2, 0.3, 0.5}));
  const Scenario tb = parse_config_text("[initial]\nprofile = table\ntable = 0 0.5 0.5 0; 1 0 0 1\n", "t");
  REQUIRE(tb.table.size() == 2);
  CHECK(tb.table[1].c == vec({0, 0, 1}));
  CHECK(!config_error("[initial]\nprofile = table\ntable = 0 0.5 0.6 0; 1 0 0 1\n").empty());
}

TEST_CASE("builtin initial profile") {
  const auto f = builtin_initial_profile("paper_cosine");
  CHECK((f(0.0) - vec({0.5, 0.5, 0.0})).norm() < 1e-16);
  CHECK((f(1.0) - vec({0.0, 0.0, 1.0})).norm() < 1e-16);
  for (int k = 0; k <= 100; ++k) {
    const Vec c = f(k / 100.0);
    CHECK(std::abs(c.sum() - 1.0) <= 1e-15);
    CHECK(c.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(builtin_initial_profile("gaussian"), ConfigError);
}

TEST_CASE("stationary initial data") {
  Scenario s = preset("well_balanced");
  const ModelParams p = s.params();
  const SimState init = initial_state(s, p);
  CHECK(init.mesh.interface_position() == doctest::Approx(0.8166666666666667).epsilon(1e-12));
  s.mu_star_g = Vec::Zero(3);
  CHECK_THROWS_AS(initial_state(s, s.params()), ConfigError);
}

TEST_CASE("runs are deterministic") {
  Scenario s = preset("equilibrium");
  s.cells = 30;
  s.t_end = 0.05;
  s.snapshot_times = {0.0, 0.02, 0.05};
  const auto base = std::filesystem::temp_directory_path() / "twophase_determinism";
  std::filesystem::remove_all(base);
  for (const char* run : {"a", "b"}) {
    s.output_dir = (base / run).string();
    std::ostringstream log;
    const RunResult r = simulate(s, {});
    CHECK(r.exit_code() == 0);
    CHECK(r.breaches.empty());
  }
  for (const char* file : {"timeseries.csv", "snapshot_t0.csv", "snapshot_t0.02.csv", "snapshot_t0.05.csv"}) {
    const std::string a = slurp(base / "a" / file), b = slurp(base / "b" / file);
    CHECK(!a.empty());
    CHECK(a == b);
  }
  std::filesystem::remove_all(base);
}

TEST_CASE("run_scenario modes") {
  const auto base = std::filesystem::temp_directory_path() / "twophase_modes";
  std::filesystem::remove_all(base);
  RunOptions opt;

  Scenario st = preset("equilibrium");
  st.mode = Mode::stationary;
  std::ostringstream out;
  CHECK(run_scenario(st, opt, out) == 0);
  CHECK(out.str().find("kind: two_phase") != std::string::npos);
  CHECK(out.str().find("X_bar = 0.81666") != std::string::npos);

  Scenario ode = preset("ode_equilibrium");
  ode.t_end = 0.5;
  ode.output_dir = (base / "ode").string();
  std::ostringstream o2;
  CHECK(run_scenario(ode, opt, o2) == 0);
  CHECK(std::filesystem::exists(base / "ode" / "ode.csv"));

  Scenario conv = preset("converge");
  conv.t_end = 0.01;
  conv.levels = {8, 16};
  conv.reference_cells = 32;
  conv.output_dir = (base / "conv").string();
  std::ostringstream o3;
  CHECK(run_scenario(conv, opt, o3) == 0);
  CHECK(slurp(base / "conv" / "convergence.csv").rfind("cells,dx,error_c,error_X", 0) == 0);
  std::filesystem::remove_all(base);
}

TEST_CASE("order fit") {
  const std::vector<double> dx = {0.1, 0.05, 0.025};
  CHECK(fit_order(dx, {0.2, 0.1, 0.05}) == doctest::Approx(1.0));
  CHECK(fit_order(dx, {0.01, 0.0025, 0.000625}) == doctest::Approx(2.0));
}
