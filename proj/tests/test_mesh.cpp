#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "twophase/diagnostics.hpp"
#include "twophase/mesh.hpp"

using namespace twophase;
using support::vec;

TEST_CASE("nearest interface index") {
  CHECK(nearest_interface_index(0.51, 100) == 51);
  CHECK(nearest_interface_index(0.0, 100) == 0);
  CHECK(nearest_interface_index(1.0, 100) == 100);
  CHECK(nearest_interface_index(0.375, 4) == 1);  // exact tie goes to the lower vertex
  CHECK(nearest_interface_index(0.376, 4) == 2);
  CHECK_THROWS_AS(nearest_interface_index(1.5, 10), DomainError);
}

TEST_CASE("cut-cell widths") {
  const auto w = build_widths(0.51, 5, 10);
  CHECK(w[4] == doctest::Approx(0.11).epsilon(1e-14));
  CHECK(w[5] == doctest::Approx(0.09).epsilon(1e-14));
  for (int k : {0, 1, 2, 3, 6, 7, 8, 9}) CHECK(w[static_cast<std::size_t>(k)] == 0.1);
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(std::abs(total - 1.0) <= 1e-14);

  const auto edge = build_widths(0.5, 5, 10);
  CHECK(edge[4] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(edge[5] == doctest::Approx(0.1).epsilon(1e-15));

  CHECK_THROWS_AS(build_widths(0.4, 5, 10), GeometryError);
  CHECK_THROWS_AS(build_widths(0.5, 0, 10), GeometryError);

  const MovingMesh mesh(10, 0.51);
  CHECK(mesh.interface_index() == 5);
  CHECK(mesh.cell_left(4) == doctest::Approx(0.4));
  CHECK(mesh.cell_right(4) == 0.51);
  CHECK(mesh.cell_left(5) == 0.51);
  CHECK(mesh.cell_right(5) == doctest::Approx(0.6));
  CHECK(mesh.phase_of(4) == Phase::solid);
  CHECK(mesh.phase_of(5) == Phase::gas);
  CHECK(mesh.two_phase());
  CHECK(MovingMesh(10, 1.0).single_phase() == Phase::solid);
  CHECK(MovingMesh(10, 0.0).single_phase() == Phase::gas);
}

TEST_CASE("initial discretization") {
  const MovingMesh mesh(10, 0.51);
  const CellField constant = discretize_initial([](double) { return Composition(vec({0.2, 0.3, 0.5})); }, mesh);
  for (const auto& c : constant) CHECK((c - vec({0.2, 0.3, 0.5})).norm() < 1e-15);

  const MovingMesh fine(100, 0.51);
  auto cosine = [](double x) {
    const double c = std::cos(M_PI * x);
    return Composition(vec({0.25 * (1 + c), 0.25 * (1 + c), 0.5 * (1 - c)}));
  };
  for (const auto& c : discretize_initial(cosine, fine)) CHECK(std::abs(c.sum() - 1.0) <= 1e-14);

  auto cos_only = [](double x) { return Composition(vec({std::cos(M_PI * x), 0.0})); };
  const CellField means = discretize_initial(cos_only, mesh);
  CHECK(std::abs(means[0][0] - std::sin(0.1 * M_PI) / (0.1 * M_PI)) <= 1e-12);
  // cut cell (0.4, 0.51)
  const double exact = (std::sin(0.51 * M_PI) - std::sin(0.4 * M_PI)) / (M_PI * 0.11);
  CHECK(std::abs(means[4][0] - exact) <= 1e-12);
}

namespace {

Vec mass_on(const CellField& c, const std::vector<double>& widths) { return total_mass(c, widths); }

}  // namespace

TEST_CASE("post-processing without a crossing") {
  std::mt19937 rng(1);
  const MovingMesh old(10, 0.51);
  const CellField c = support::random_field(rng, 10, 3);
  const PostProcessResult r = post_process(c, 0.53, old);
  CHECK_FALSE(r.crossed);
  CHECK(r.mesh.interface_index() == 5);
  CHECK(r.mesh.interface_position() == 0.53);
  for (int k = 0; k < 10; ++k) CHECK(r.c[static_cast<std::size_t>(k)] == c[static_cast<std::size_t>(k)]);
  CHECK(r.mesh.widths() == build_widths(0.53, 5, 10));
  CHECK_THROWS_AS(post_process(c, 0.51 + 0.06, old), CflError);
}

TEST_CASE("post-processing of a rightward crossing") {
  std::mt19937 rng(2);
  const MovingMesh old(10, 0.51);
  const CellField c = support::random_field(rng, 10, 3);
  const PostProcessResult r = post_process(c, 0.56, old);
  CHECK(r.crossed);
  CHECK(r.mesh.interface_index() == 6);
  CHECK(r.c[4] == c[4]);  // restored fixed cell (0.4, 0.5)
  CHECK(r.c[5] == c[4]);  // new solid cut cell (0.5, 0.56)
  const Vec merged = (0.04 * c[5] + 0.1 * c[6]) / 0.14;
  CHECK((r.c[6] - merged).norm() < 1e-15);
  CHECK(r.mesh.width(5) == doctest::Approx(0.06));
  CHECK(r.mesh.width(6) == doctest::Approx(0.14));
}

TEST_CASE("post-processing of a leftward crossing") {
  std::mt19937 rng(3);
  const MovingMesh old(10, 0.47);
  const CellField c = support::random_field(rng, 10, 3);
  const PostProcessResult r = post_process(c, 0.44, old);
  CHECK(r.crossed);
  CHECK(r.mesh.interface_index() == 4);
  CHECK(r.c[5] == c[5]);  // restored fixed cell (0.5, 0.6)
  CHECK(r.c[4] == c[5]);  // new gas cut cell (0.44, 0.5)
  const Vec merged = (0.04 * c[4] + 0.1 * c[3]) / 0.14;
  CHECK((r.c[3] - merged).norm() < 1e-15);
}

TEST_CASE("post-processing conserves mass and does not raise the energy") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const ModelParams p = support::equilibrium_params();
  int crossings_right = 0, crossings_left = 0, pins = 0;
  for (int s = 0; s < 400; ++s) {
    const int n_cells = 4 + s % 29;
    const int k_old = 2 + static_cast<int>(frac(rng) * (n_cells - 3));
    const double dx = 1.0 / n_cells;
    const double x_old = (k_old + (frac(rng) - 0.5) * 0.98) * dx;
    const MovingMesh old(n_cells, x_old, k_old);
    double x_new = std::clamp(x_old + (frac(rng) - 0.5) * 0.999 * dx, 1e-9, 1.0 - 1e-9);
    if (s % 10 == 0) x_new = std::min(1.0 - 1e-9, x_old + 0.499 * dx);

    const CellField c_star = support::random_field(rng, n_cells, 3);
    const auto trial = build_widths(x_new, k_old, n_cells);
    const PostProcessResult r = post_process(c_star, x_new, old);
    const Vec before = mass_on(c_star, trial), after = mass_on(r.c, r.mesh.widths());
    CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-14);
    for (const auto& c : r.c) CHECK(std::abs(c.sum() - 1.0) <= 1e-14);

    // Regular crossings only average values of one phase. Pinning merges a
    // remnant of the vanishing phase into the other one, which convexity does not cover.
    const double h_star = discrete_free_energy(c_star, trial, k_old, p);
    if (!r.pinned) CHECK(discrete_free_energy(r.c, r.mesh, p) <= h_star + 1e-12);

    if (!r.pinned) CHECK(r.mesh.widths() == build_widths(r.mesh.interface_position(), r.mesh.interface_index(), n_cells));
    if (r.pinned) ++pins;
    else if (r.crossed && r.mesh.interface_index() > k_old) ++crossings_right;
    else if (r.crossed) ++crossings_left;
  }
  CHECK(crossings_right > 20);
  CHECK(crossings_left > 20);
  CHECK(pins > 0);
}

TEST_CASE("pinning at the boundary") {
  std::mt19937 rng(5);
  {
    const MovingMesh old(10, 0.92, 9);
    const CellField c = support::random_field(rng, 10, 3);
    const PostProcessResult r = post_process(c, 0.96, old);
    CHECK(r.pinned);
    CHECK(r.mesh.interface_position() == 1.0);
    CHECK(r.mesh.single_phase() == Phase::solid);
    const Vec before = total_mass(c, build_widths(0.96, 9, 10));
    CHECK((before - total_mass(r.c, r.mesh.widths())).cwiseAbs().maxCoeff() <= 1e-15);
  }
  {
    const MovingMesh old(10, 0.17, 2);
    const CellField c = support::random_field(rng, 10, 3);
    const PostProcessResult r = post_process(c, 0.14, old);
    CHECK(r.pinned);
    CHECK(r.mesh.interface_position() == 0.0);
    CHECK(r.mesh.single_phase() == Phase::gas);
    CHECK(r.c[0] == r.c[1]);
    const Vec before = total_mass(c, build_widths(0.14, 2, 10));
    CHECK((before - total_mass(r.c, r.mesh.widths())).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("piecewise-constant interpolation") {
  std::mt19937 rng(6);
  const MovingMesh mesh(10, 0.51);
  const CellField c = support::random_field(rng, 10, 3);
  const PiecewiseConstant f = interpolate(c, mesh);
  for (int k = 0; k < 10; ++k)
    CHECK(f(0.5 * (mesh.cell_left(k) + mesh.cell_right(k))) == c[static_cast<std::size_t>(k)]);
  CHECK((f.integral(0.0, 1.0) - total_mass(c, mesh.widths())).norm() < 1e-15);
  const CellField back = project_mean(f, mesh);
  for (int k = 0; k < 10; ++k) CHECK((back[static_cast<std::size_t>(k)] - c[static_cast<std::size_t>(k)]).norm() < 1e-14);
  CHECK_THROWS_AS(f(1.1), DomainError);

  // projection onto a coarser mesh keeps the mass
  const MovingMesh fine(40, 0.5);
  const CellField cf = support::random_field(rng, 40, 3);
  const MovingMesh coarse(10, 0.5);
  const CellField pc = project_mean(interpolate(cf, fine), coarse);
  CHECK((total_mass(pc, coarse.widths()) - total_mass(cf, fine.widths())).cwiseAbs().maxCoeff() < 1e-15);
}
