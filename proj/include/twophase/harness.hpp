#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twophase/diagnostics.hpp"
#include "twophase/simplified_ode.hpp"
#include "twophase/solver.hpp"
#include "twophase/stationary.hpp"

namespace twophase {

/// Invalid or inconsistent scenario configuration. The message carries the
/// source and line when the problem comes from a file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { pde, ode, converge, stationary };

std::string_view to_string(Mode mode);

struct TableRow {
  double x;
  Composition c;
};

struct Scenario {
  std::string name = "custom";
  Mode mode = Mode::pde;
  bool derived = false;  ///< parameters not taken from published data

  int cells = 100;
  double X0 = 0.51;
  double dt = 1e-3;
  double t_end = 5.0;
  StepperConfig stepper;

  Mat kappa_s, kappa_g;
  Vec mu_star_s, mu_star_g;

  /// paper_cosine, uniform, table or stationary.
  std::string profile = "paper_cosine";
  Composition uniform;
  std::vector<TableRow> table;

  std::vector<double> snapshot_times;
  std::string output_dir = "out";

  std::vector<int> levels = {8, 16, 32, 64, 128};
  int reference_cells = 512;

  double ode_dt = 1e-3;

  ModelParams params() const;
  /// Throws ConfigError on any invalid field.
  void validate() const;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
Scenario preset(std::string_view name);

Scenario parse_config_text(std::string_view text, std::string_view source = "<string>");
Scenario parse_config(const std::string& path);
/// A config file path, or the name of a builtin preset.
Scenario load_scenario(const std::string& path_or_preset);

/// Builtin initial data: `paper_cosine` gives c1 = c2 = (1 + cos pi x)/4, c3 = (1 - cos pi x)/2.
std::function<Composition(double)> builtin_initial_profile(std::string_view name);

/// Initial state of a pde scenario. The `stationary` profile projects the
/// two-phase stationary state for the masses of the paper_cosine data.
SimState initial_state(const Scenario& s, const ModelParams& params);

struct RunOptions {
  bool strict = false;       ///< stop at the first invariant breach
  bool write_files = true;
  std::ostream* log = nullptr;
  std::function<void(const SimState& old, const StepResult& step, const DissipationReport& report)> on_step;
};

struct RunResult {
  SimState final_state;
  Vec m0;
  StationaryState stationary;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::string> breaches;
  int steps = 0;
  int clean_steps = 0;  ///< accepted without halving
  bool failed = false;
  bool aborted = false;  ///< strict mode stopped on a breach
  std::string failure;

  int exit_code() const;
};

/// Runs a pde scenario: time series, snapshots and invariant checks.
RunResult simulate(const Scenario& s, const RunOptions& options = {});

struct ConvergenceLevel {
  int cells;
  double dx;
  L1Errors errors;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  int reference_cells = 0;
  double order_c = 0.0;
  double order_X = 0.0;
};

/// Least-squares slope of log(err) against log(dx).
double fit_order(const std::vector<double>& dx, const std::vector<double>& err);

/// Runs the reference grid, then all coarse levels concurrently, and fits the order.
ConvergenceResult convergence_study(const Scenario& s, std::ostream* log = nullptr);

/// Space-homogeneous reduction started from the masses on either side of X0.
Trajectory run_ode(const Scenario& s);

/// Dispatches on the scenario mode, writes outputs and returns the exit code
/// (0 ok, 3 solver failure, 4 invariant breach in strict mode).
int run_scenario(const Scenario& s, const RunOptions& options, std::ostream& out);

}  // namespace twophase
