#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/fluxes.hpp"
#include "twophase/mesh.hpp"
#include "twophase/model.hpp"

namespace twophase {

/// Time step could not be completed even after the allowed number of halvings.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimState {
  CellField c;
  MovingMesh mesh;
  double t = 0.0;

  /// Set once the interface has been absorbed at 0 or 1.
  std::optional<Phase> single_phase() const { return mesh.single_phase(); }
};

struct StepperConfig {
  double dt_init = 1e-3;
  double cfl_safety = 0.9;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int max_halvings = 20;
  /// Consecutive clean steps after which a reduced dt is doubled again.
  int growth_streak = 10;
};

/// C = max_i 2 cosh(|log beta_i| / 2), the bound on |F_i| over admissible states.
double cfl_constant(const ModelParams& params);

/// Largest step allowed by the CFL condition, scaled by the safety factor.
double cfl_time_step(double dx, const ModelParams& params, double safety);

/// Cell widths of the intermediate mesh for trial values c: the old widths,
/// except that the cut cells follow X~ = X_old + dt sum_i F~_i(c).
std::vector<double> trial_widths(const CellField& c, const SimState& given, double dt,
                                 const ModelParams& params);

/// Residual of the implicit step from `given` with step dt, per cell and species:
/// (W~_K c_K - W_K c_old_K) / dt + J_{K+1/2}(c) - J_{K-1/2}(c).
CellField residual(const CellField& c, const SimState& given, double dt, const ModelParams& params);

/// Block-tridiagonal matrix with dense n x n blocks. lower[k] couples cell k to
/// k-1 (lower[0] unused), upper[k] couples k to k+1 (upper.back() unused).
struct BlockTridiagonal {
  std::vector<Mat> lower, diag, upper;

  BlockTridiagonal(int cells, int species);
  int cells() const { return static_cast<int>(diag.size()); }
  Mat to_dense() const;
  /// Block Thomas elimination. Throws NumericalError on a singular pivot block.
  CellField solve(const CellField& rhs) const;
};

/// Analytic Jacobian of `residual` with respect to c.
BlockTridiagonal jacobian(const CellField& c, const SimState& given, double dt, const ModelParams& params);

enum class DifferenceScheme { central, backward };

/// Dense finite-difference Jacobian of `residual`, for testing only. On the
/// admissible set the truncation map has a kink, and the analytic Jacobian
/// follows the inner branch, which backward differences also see.
Mat finite_difference_jacobian(const CellField& c, const SimState& given, double dt,
                               const ModelParams& params, double h = 1e-7,
                               DifferenceScheme scheme = DifferenceScheme::central);

struct NewtonResult {
  bool converged = false;
  CellField c;
  int iterations = 0;
  double last_update = 0.0;
  std::string failure;
};

/// Newton iteration from the previous concentrations, stopped when the update
/// satisfies ||dc||_inf <= tol. Never throws on numerical trouble; reports it.
NewtonResult newton_solve(const SimState& given, double dt, const ModelParams& params,
                          const StepperConfig& config);

struct StepResult {
  SimState state;        ///< after post-processing
  CellField c_star;      ///< Newton root on the intermediate mesh
  double X_new = 0.0;    ///< X_old + dt sum_i F_i(c_star), before any pinning
  double dt = 0.0;
  int newton_iterations = 0;
  int halvings = 0;
  bool crossed = false;
  bool pinned = false;
};

/// One accepted step of size dt_try or smaller: dt is halved on Newton failure
/// or geometric breakdown. Throws SolverError when the halvings are exhausted.
StepResult advance(const SimState& state, double dt_try, const ModelParams& params,
                   const StepperConfig& config);

/// Sequential time loop with CFL clamping and halving/doubling step control.
class TimeStepper {
 public:
  TimeStepper(ModelParams params, StepperConfig config, SimState initial);

  /// Advances one step, never past `t_stop`.
  StepResult step(double t_stop);

  const SimState& state() const { return state_; }
  const ModelParams& params() const { return params_; }
  const StepperConfig& config() const { return config_; }
  double dt() const { return dt_; }
  double dt_cap() const { return dt_cap_; }

 private:
  ModelParams params_;
  StepperConfig config_;
  SimState state_;
  double dt_cap_;
  double dt_;
  int streak_ = 0;
};

}  // namespace twophase
