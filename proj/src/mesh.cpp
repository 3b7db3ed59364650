#include "twophase/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace twophase {

int nearest_interface_index(double position, int cells) {
  if (!(position >= 0.0 && position <= 1.0))
    throw DomainError("interface position must lie in [0,1]");
  const int below = std::clamp(static_cast<int>(std::floor(position * cells)), 0, cells);
  if (below == cells) return cells;
  const double d_below = std::abs(static_cast<double>(below) / cells - position);
  const double d_above = std::abs(static_cast<double>(below + 1) / cells - position);
  return d_below <= d_above ? below : below + 1;
}

std::vector<double> build_widths(double position, int interface_index, int cells) {
  if (cells < 1) throw GeometryError("mesh needs at least one cell");
  const double dx = 1.0 / cells;
  std::vector<double> widths(static_cast<std::size_t>(cells), dx);
  if (interface_index == 0 || interface_index == cells) {
    const double pinned = interface_index == 0 ? 0.0 : 1.0;
    if (position != pinned) {
      std::ostringstream os;
      os << "interface index " << interface_index << " requires X = " << pinned << ", got " << position;
      throw GeometryError(os.str());
    }
    return widths;
  }
  if (interface_index < 0 || interface_index > cells)
    throw GeometryError("interface index out of range");

  const double left = static_cast<double>(interface_index - 1) / cells;
  const double right = static_cast<double>(interface_index + 1) / cells;
  const double w_solid = position - left;
  const double w_gas = right - position;
  if (!(w_solid > 0.0) || !(w_gas > 0.0)) {
    std::ostringstream os;
    os << "nonpositive cut-cell width for X = " << position << " and index " << interface_index;
    throw GeometryError(os.str());
  }
  widths[static_cast<std::size_t>(interface_index - 1)] = w_solid;
  widths[static_cast<std::size_t>(interface_index)] = w_gas;
  return widths;
}

MovingMesh::MovingMesh(int cells, double interface_position)
    : MovingMesh(cells, interface_position, nearest_interface_index(interface_position, cells)) {}

MovingMesh::MovingMesh(int cells, double interface_position, int interface_index)
    : cells_(cells),
      position_(interface_position),
      index_(interface_index),
      widths_(build_widths(interface_position, interface_index, cells)) {}

double MovingMesh::cell_left(int slot) const {
  if (two_phase() && slot == index_) return position_;
  return vertex(slot);
}

double MovingMesh::cell_right(int slot) const {
  if (two_phase() && slot == index_ - 1) return position_;
  return vertex(slot + 1);
}

std::optional<Phase> MovingMesh::single_phase() const {
  if (index_ == 0) return Phase::gas;
  if (index_ == cells_) return Phase::solid;
  return std::nullopt;
}

CellField discretize_initial(const std::function<Composition(double)>& c0, const MovingMesh& mesh) {
  // 5-point Gauss-Legendre on [-1, 1]
  static constexpr std::array<double, 5> nodes = {
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
      0.2369268850561891};

  CellField cells;
  cells.reserve(static_cast<std::size_t>(mesh.cells()));
  for (int k = 0; k < mesh.cells(); ++k) {
    const double a = mesh.cell_left(k);
    const double b = mesh.cell_right(k);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Composition mean;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      Composition value = c0(mid + half * nodes[q]);
      if (q == 0)
        mean = weights[q] * value;
      else
        mean += weights[q] * value;
    }
    cells.push_back(0.5 * mean);
  }
  return cells;
}

Vec total_mass(const CellField& c, const std::vector<double>& widths) {
  if (c.empty() || c.size() != widths.size()) throw GeometryError("field and mesh sizes differ");
  Vec m = Vec::Zero(c.front().size());
  for (std::size_t k = 0; k < c.size(); ++k) m += widths[k] * c[k];
  return m;
}

PostProcessResult post_process(const CellField& c_star, double new_position,
                               const MovingMesh& mesh_old) {
  const int n_cells = mesh_old.cells();
  const int k_old = mesh_old.interface_index();
  if (!mesh_old.two_phase()) throw GeometryError("post_process requires a two-phase mesh");
  if (static_cast<int>(c_star.size()) != n_cells) throw GeometryError("field and mesh sizes differ");

  const double dx = mesh_old.dx();
  if (std::abs(new_position - mesh_old.interface_position()) > 0.5 * dx * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "interface moved by " << new_position - mesh_old.interface_position()
       << ", more than half a cell (" << 0.5 * dx << ")";
    throw CflError(os.str());
  }

  int k_new = nearest_interface_index(new_position, n_cells);
  // Ties keep the old index: re-indexing happens only on a strict crossing.
  if (k_new != k_old &&
      std::abs(mesh_old.vertex(k_old) - new_position) == std::abs(mesh_old.vertex(k_new) - new_position))
    k_new = k_old;

  PostProcessResult out{c_star, mesh_old, false, false};
  if (k_new == k_old) {
    out.mesh = MovingMesh(n_cells, new_position, k_old);
    return out;
  }
  if (std::abs(k_new - k_old) != 1) throw CflError("interface index jumped by more than one");
  out.crossed = true;

  const std::size_t s = static_cast<std::size_t>(k_old - 1);  // old solid cut cell
  const std::size_t g = static_cast<std::size_t>(k_old);      // old gas cut cell
  CellField& c = out.c;

  if (k_new == k_old + 1) {
    // Solid value fills the restored fixed cell and the new solid cut cell.
    c[s] = c_star[s];
    c[g] = c_star[s];
    if (k_new == n_cells) {
      // Gas remnant (X, 1) is absorbed into the last cell.
      const double w_solid = new_position - mesh_old.vertex(k_old);
      const double w_gas = 1.0 - new_position;
      c[g] = (w_solid * c_star[s] + w_gas * c_star[g]) / dx;
      out.pinned = true;
      out.mesh = MovingMesh(n_cells, 1.0, n_cells);
      return out;
    }
    const double w_cut = mesh_old.vertex(k_old + 1) - new_position;
    c[g + 1] = (w_cut * c_star[g] + dx * c_star[g + 1]) / (w_cut + dx);
  } else {
    // Mirror image: gas value fills the restored fixed cell and the new gas cut cell.
    c[g] = c_star[g];
    c[s] = c_star[g];
    const double w_cut = new_position - mesh_old.vertex(k_old - 1);
    c[s - 1] = (w_cut * c_star[s] + dx * c_star[s - 1]) / (w_cut + dx);
    if (k_new <= 1) {
      // Solid cell (0, X) and gas cell (X, 2 dx) merge into two uniform gas cells.
      const double w_solid = new_position;
      const double w_gas = 2.0 * dx - new_position;
      const Composition merged = (w_solid * c[0] + w_gas * c[1]) / (2.0 * dx);
      c[0] = merged;
      c[1] = merged;
      out.pinned = true;
      out.mesh = MovingMesh(n_cells, 0.0, 0);
      return out;
    }
  }
  out.mesh = MovingMesh(n_cells, new_position, k_new);
  return out;
}

PiecewiseConstant::PiecewiseConstant(CellField values, const MovingMesh& mesh)
    : values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh.cells())
    throw GeometryError("field and mesh sizes differ");
  edges_.reserve(values_.size() + 1);
  edges_.push_back(0.0);
  for (int k = 0; k < mesh.cells(); ++k) edges_.push_back(mesh.cell_right(k));
  edges_.back() = 1.0;
}

const Composition& PiecewiseConstant::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("evaluation point outside [0,1]");
  auto it = std::upper_bound(edges_.begin() + 1, edges_.end() - 1, x);
  return values_[static_cast<std::size_t>(it - edges_.begin() - 1)];
}

Vec PiecewiseConstant::integral(double a, double b) const {
  if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw DomainError("integration interval outside [0,1]");
  Vec total = Vec::Zero(values_.front().size());
  auto first = std::upper_bound(edges_.begin(), edges_.end(), a);
  std::size_t k = first == edges_.begin() ? 0 : static_cast<std::size_t>(first - edges_.begin() - 1);
  for (; k < values_.size() && edges_[k] < b; ++k) {
    const double lo = std::max(a, edges_[k]);
    const double hi = std::min(b, edges_[k + 1]);
    if (hi > lo) total += (hi - lo) * values_[k];
  }
  return total;
}

PiecewiseConstant interpolate(const CellField& c, const MovingMesh& mesh) {
  return PiecewiseConstant(c, mesh);
}

CellField project_mean(const PiecewiseConstant& fine, const MovingMesh& coarse) {
  CellField out;
  out.reserve(static_cast<std::size_t>(coarse.cells()));
  for (int k = 0; k < coarse.cells(); ++k) out.push_back(fine.mean(coarse.cell_left(k), coarse.cell_right(k)));
  return out;
}

}  // namespace twophase
