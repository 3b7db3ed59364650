#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "twophase/diagnostics.hpp"
#include "twophase/stationary.hpp"

using namespace twophase;
using support::vec;

namespace {

const Vec kM0 = vec({0.25, 0.25, 0.5});

SimState cosine_sim(int cells, double x0 = 0.51) {
  MovingMesh mesh(cells, x0);
  auto cosine = [](double x) {
    const double c = std::cos(M_PI * x);
    return Composition(vec({0.25 * (1 + c), 0.25 * (1 + c), 0.5 * (1 - c)}));
  };
  return {discretize_initial(cosine, mesh), mesh, 0.0};
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("discrete free energy") {
  const ModelParams zero = support::paper_params(vec({1, 1, 1}));
  const MovingMesh mesh(10, 0.51);
  CHECK(discrete_free_energy(CellField(10, kM0), mesh, zero) ==
        doctest::Approx(free_energy_density(kM0, Phase::solid, zero)).epsilon(1e-14));
  CellField pure;
  for (int k = 0; k < 10; ++k) pure.push_back(Vec::Unit(3, k % 3));
  CHECK(discrete_free_energy(pure, mesh, zero) == doctest::Approx(2.0).epsilon(1e-14));

  const ModelParams p = support::equilibrium_params();
  const StationaryState st = solve_stationary(kM0, p.beta_star());
  const MovingMesh bar(50, st.X_bar);
  CellField c;
  for (int k = 0; k < 50; ++k) c.push_back(bar.phase_of(k) == Phase::solid ? st.c_bar_s : st.c_bar_g);
  const double expected = st.X_bar * free_energy_density(st.c_bar_s, Phase::solid, p) +
                          (1 - st.X_bar) * free_energy_density(st.c_bar_g, Phase::gas, p);
  CHECK(discrete_free_energy(c, bar, p) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(relative_free_energy(c, bar, st.c_bar_s, st.c_bar_g) == 0.0);
}

TEST_CASE("dissipation report") {
  const StepperConfig cfg;
  SUBCASE("stationary step") {
    const ModelParams p = support::equilibrium_params();
    const StationaryState st = solve_stationary(kM0, p.beta_star());
    const MovingMesh bar(20, st.X_bar);
    CellField c;
    for (int k = 0; k < 20; ++k) c.push_back(bar.phase_of(k) == Phase::solid ? st.c_bar_s : st.c_bar_g);
    const SimState s{c, bar, 0.0};
    const DissipationReport r = dissipation_report(s, advance(s, 1e-3, p, cfg), p);
    CHECK(std::abs(r.bulk) < 1e-20);
    CHECK(std::abs(r.interface_linear) < 1e-20);
    CHECK(std::abs(r.strong_phi) < 1e-20);
    CHECK(std::abs(r.slack()) < 1e-14);
  }
  SUBCASE("first step of the trivial case") {
    const ModelParams p = support::paper_params(vec({1, 1, 1}));
    const SimState s = cosine_sim(40);
    const StepResult step = advance(s, 8e-4, p, cfg);
    const DissipationReport r = dissipation_report(s, step, p);
    CHECK(r.bulk > 0.0);
    CHECK(r.interface_linear >= 0.0);
    CHECK(r.fenchel_young_ok);
    CHECK(r.weak_bound_ok);
    CHECK(r.slack() >= -1e-10);
    CHECK(r.H_new < r.H_old);
  }
  SUBCASE("equilibrium steps") {
    const ModelParams p = support::equilibrium_params();
    SimState s = cosine_sim(40);
    for (int i = 0; i < 20; ++i) {
      const StepResult step = advance(s, 6e-4, p, cfg);
      const DissipationReport r = dissipation_report(s, step, p);
      CHECK(r.interface_linear > 0.0);
      CHECK(std::abs(r.interface_linear - r.strong_phi) <= 1e-10 * r.strong_phi);
      CHECK(r.weak_phi <= r.strong_phi);
      CHECK(r.slack() >= -1e-10);
      CHECK(check_step_invariants(s, step, kM0, r).empty());
      s = step.state;
    }
    // relative entropy form agrees with the plain difference
    const StationaryState st = solve_stationary(total_mass(s.c, s.mesh.widths()), p.beta_star());
    const MovingMesh bar(40, st.X_bar);
    CellField cb;
    for (int k = 0; k < 40; ++k) cb.push_back(bar.phase_of(k) == Phase::solid ? st.c_bar_s : st.c_bar_g);
    const double direct = discrete_free_energy(s.c, s.mesh, p) - discrete_free_energy(cb, bar, p);
    CHECK(relative_free_energy(s.c, s.mesh, st.c_bar_s, st.c_bar_g) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("invariant checks flag violations") {
  const ModelParams p = support::equilibrium_params();
  const SimState s = cosine_sim(20);
  StepResult step = advance(s, 6e-4, p, StepperConfig{});
  const DissipationReport r = dissipation_report(s, step, p);
  CHECK(check_step_invariants(s, step, kM0, r).empty());
  step.state.c[3][0] += 1e-6;
  CHECK_FALSE(check_step_invariants(s, step, kM0, r).empty());
}

TEST_CASE("records") {
  const ModelParams p = support::equilibrium_params();
  const SimState s = cosine_sim(20);
  const StationaryState st = solve_stationary(kM0, p.beta_star());
  const DiagnosticsRecord rec = make_record(s, p, &st);
  CHECK(rec.X == 0.51);
  CHECK(rec.K_int == 10);
  CHECK(rec.dX_rel == doctest::Approx(std::abs(0.51 - st.X_bar)));
  CHECK(rec.H_rel > 0.0);
  CHECK((rec.masses - kM0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::isnan(make_record(s, p, nullptr).H_rel));
}

TEST_CASE("L1 errors") {
  const MovingMesh coarse(8, 0.5), fine(32, 0.5);
  std::mt19937 rng(71);
  const CellField cf = support::random_field(rng, 32, 3);
  const PiecewiseConstant ff(cf, fine);
  const CellField cc = project_mean(ff, coarse);
  CHECK(l1_distance(cc, coarse, ff) < 1e-15);

  std::vector<RunSample> ref, co;
  for (int p = 1; p <= 4; ++p) {
    ref.push_back({0.1 * p, 0.1, 0.5, ff});
    co.push_back({0.1 * p, 0.1, 0.5, PiecewiseConstant(cc, coarse)});
  }
  const L1Errors self = l1_errors(ref, 32, ref, 32);
  CHECK(self.error_c == 0.0);
  CHECK(self.error_X == 0.0);
  CHECK(l1_errors(co, 8, ref, 32).error_c < 1e-14);

  std::vector<RunSample> shifted = co;
  for (auto& sm : shifted) sm.X = 0.52;
  CHECK(l1_errors(shifted, 8, ref, 32).error_X == doctest::Approx(4 * 0.1 * 0.02));
  CHECK_THROWS_AS(l1_errors(co, 8, ref, 12), DomainError);
}

TEST_CASE("output formats") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(0.51) == "0.51");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")) == "nan");

  const auto dir = std::filesystem::temp_directory_path() / "twophase_diag_test";
  std::filesystem::create_directories(dir);
  {
    TimeSeriesWriter w((dir / "ts.csv").string(), 3);
    w.write(make_record(cosine_sim(10), support::equilibrium_params(), nullptr));
  }
  CHECK(first_line((dir / "ts.csv").string()) ==
        "t,X,K_int,H,H_rel,dX_rel,m_1,m_2,m_3,diss_bulk,diss_interface,newton_iters,dt");
  const SimState s = cosine_sim(10);
  write_snapshot((dir / "snap.csv").string(), s.c, s.mesh);
  CHECK(first_line((dir / "snap.csv").string()) == "x_left,x_right,c_1,c_2,c_3");
  std::filesystem::remove_all(dir);
}
