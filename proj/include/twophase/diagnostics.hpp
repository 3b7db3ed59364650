#pragma once

#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "twophase/mesh.hpp"
#include "twophase/model.hpp"
#include "twophase/solver.hpp"
#include "twophase/stationary.hpp"

namespace twophase {

/// Discrete free energy sum_K W_K h_{alpha_K}(c_K), solid for slots below the interface index.
double discrete_free_energy(const CellField& c, const MovingMesh& mesh, const ModelParams& params);
/// Same with explicit widths and interface index (for the intermediate mesh of a step).
double discrete_free_energy(const CellField& c, const std::vector<double>& widths, int interface_index,
                            const ModelParams& params);

/// Free energy relative to a two-phase reference c_bar (per phase), written as a
/// relative entropy sum_K W_K sum_i [c log(c / c_bar) - c + c_bar]. For masses
/// equal to those of the reference and unit cell sums it equals H - H_bar
/// without the cancellation of the direct difference.
double relative_free_energy(const CellField& c, const MovingMesh& mesh, const Composition& c_bar_s,
                            const Composition& c_bar_g);

struct DissipationReport {
  double H_old = 0.0;
  double H_new = 0.0;
  double bulk = 0.0;              ///< dt/dx sum over bulk edges of (D log c)^T M (D log c)
  double interface_linear = 0.0;  ///< dt sum_i F_i [mu_i]
  double strong_phi = 0.0;        ///< dt sum_i g_i (phi([mu_i]) + phi*(F_i / g_i)), g_i = sqrt(cs_i cg_i)
  double weak_phi = 0.0;          ///< dt sum_i phi*(F_i)
  bool fenchel_young_ok = true;   ///< interface_linear == strong_phi to relative 1e-10
  bool weak_bound_ok = true;      ///< weak_phi <= strong_phi
  /// H_old - (H_new + bulk + interface_linear); the inequality holds when >= -1e-10.
  double slack() const { return H_old - (H_new + bulk + interface_linear); }
};

/// Terms of the discrete dissipation inequality for the accepted step old -> step.state.
/// Bulk edges and phases are those of the old mesh; the interface edge is excluded.
DissipationReport dissipation_report(const SimState& old, const StepResult& step, const ModelParams& params);

struct DiagnosticsRecord {
  double t = 0.0;
  double X = 0.0;
  int K_int = 0;
  double H = 0.0;
  double H_rel = std::numeric_limits<double>::quiet_NaN();
  double dX_rel = std::numeric_limits<double>::quiet_NaN();
  Vec masses;
  double diss_bulk = 0.0;
  double diss_interface = 0.0;
  double diss_phi_star = 0.0;
  int newton_iters = 0;
  double dt = 0.0;
};

/// Record of a state; dissipation terms and step data are left at zero.
DiagnosticsRecord make_record(const SimState& state, const ModelParams& params,
                              const StationaryState* reference);

struct InvariantTolerances {
  double volume_filling = 1e-10;
  double mass_drift = 1e-10;   ///< relative, per species
  double energy_slack = 1e-12;
  double dissipation_slack = 1e-10;
  double interface_sign = 1e-12;
};

/// Checks one accepted step. Returns human-readable breaches (empty if none).
std::vector<std::string> check_step_invariants(const SimState& old, const StepResult& step,
                                               const Vec& m0, const DissipationReport& report,
                                               const InvariantTolerances& tol = {});

struct L1Errors {
  double error_c = 0.0;
  double error_X = 0.0;
};

/// One sample of a run: accepted step time, its step size, interface and field.
struct RunSample {
  double t;
  double dt;
  double X;
  PiecewiseConstant field;
};

/// sum_K W_K sum_i |c_K - mean of reference over cell K|.
double l1_distance(const CellField& c, const MovingMesh& mesh, const PiecewiseConstant& reference);

/// Space-time L1 errors of `coarse` against `reference`, accumulated at the
/// coarse step times with the reference taken at the nearest sample time.
/// Throws DomainError unless the reference cell count is a multiple of the coarse one.
L1Errors l1_errors(const std::vector<RunSample>& coarse, int coarse_cells,
                   const std::vector<RunSample>& reference, int reference_cells);

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Time-series CSV: t,X,K_int,H,H_rel,dX_rel,m_1..m_n,diss_bulk,diss_interface,newton_iters,dt.
class TimeSeriesWriter {
 public:
  TimeSeriesWriter(const std::string& path, int species);
  void write(const DiagnosticsRecord& record);

 private:
  std::ofstream out_;
};

/// Snapshot CSV with one row x_left,x_right,c_1..c_n per cell.
void write_snapshot(const std::string& path, const CellField& c, const MovingMesh& mesh);

}  // namespace twophase
