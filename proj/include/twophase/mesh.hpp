#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twophase/model.hpp"

namespace twophase {

/// Cell geometry inconsistent with the interface position.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interface displacement larger than half a cell in one step.
class CflError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Per-cell concentrations, one admissible vector per cell.
using CellField = std::vector<Composition>;

/// Uniform grid of N cells on (0,1), locally cut at the interface X.
///
/// Cells are stored 0-based. The interface index `interface_index()` follows the
/// 1-based convention of the vertices x_{K+1/2} = K dx: with K = interface_index(),
/// cell K (storage slot K-1) is the solid cut cell (x_{K-1/2}, X) and cell K+1
/// (slot K) is the gas cut cell (X, x_{K+3/2}). K = 0 with X = 0 means the whole
/// domain is gas, K = N with X = 1 means it is solid.
class MovingMesh {
 public:
  MovingMesh(int cells, double interface_position);
  /// Explicit index, used when re-indexing must keep a tie on the old side.
  MovingMesh(int cells, double interface_position, int interface_index);

  int cells() const { return cells_; }
  double dx() const { return 1.0 / cells_; }
  double interface_position() const { return position_; }
  int interface_index() const { return index_; }
  const std::vector<double>& widths() const { return widths_; }
  double width(int slot) const { return widths_[static_cast<std::size_t>(slot)]; }

  /// Vertex x_{K+1/2} = K / N, K in {0..N}.
  double vertex(int k) const { return static_cast<double>(k) / cells_; }
  double cell_left(int slot) const;
  double cell_right(int slot) const;

  /// Phase label of a storage slot: solid for slots < interface_index().
  Phase phase_of(int slot) const { return slot < index_ ? Phase::solid : Phase::gas; }

  bool two_phase() const { return index_ > 0 && index_ < cells_; }
  /// Remaining phase once the interface has been absorbed at 0 or 1.
  std::optional<Phase> single_phase() const;

 private:
  int cells_;
  double position_;
  int index_;
  std::vector<double> widths_;
};

/// Lowest K in {0..N} minimizing |K dx - X|.
int nearest_interface_index(double position, int cells);

/// Cell widths for interface X with interface index K (1 <= K <= N-1), or the
/// uniform widths when (K, X) is (0, 0) or (N, 1).
std::vector<double> build_widths(double position, int interface_index, int cells);

/// Cell means of c0 over the cells of `mesh`, by 5-point Gauss-Legendre per cell.
CellField discretize_initial(const std::function<Composition(double)>& c0, const MovingMesh& mesh);

/// Per-species total mass sum_K width_K c_K.
Vec total_mass(const CellField& c, const std::vector<double>& widths);

/// Result of the mesh update after an interface move.
struct PostProcessResult {
  CellField c;
  MovingMesh mesh;
  bool crossed = false;
  bool pinned = false;
};

/// Moves the interface from `mesh_old` to `new_position`, re-indexes the cut
/// cells and redistributes `c_star` (given on the intermediate cells with the
/// old index and the new position) by projection and mass-weighted averaging.
/// Reaching index N pins the interface at 1; reaching index 1 pins it at 0.
PostProcessResult post_process(const CellField& c_star, double new_position,
                               const MovingMesh& mesh_old);

/// Piecewise-constant function on (0,1) built from cell values.
class PiecewiseConstant {
 public:
  PiecewiseConstant(CellField values, const MovingMesh& mesh);

  /// Value of the containing cell. Points on an interior edge belong to the right cell.
  const Composition& operator()(double x) const;

  /// Integral over (a, b) of the function, per species.
  Vec integral(double a, double b) const;
  /// Mean value over (a, b).
  Vec mean(double a, double b) const { return integral(a, b) / (b - a); }

  const std::vector<double>& edges() const { return edges_; }
  const CellField& values() const { return values_; }

 private:
  CellField values_;
  std::vector<double> edges_;
};

PiecewiseConstant interpolate(const CellField& c, const MovingMesh& mesh);

/// Mean-value projection of `fine` onto the cells of `coarse`.
CellField project_mean(const PiecewiseConstant& fine, const MovingMesh& coarse);

}  // namespace twophase
