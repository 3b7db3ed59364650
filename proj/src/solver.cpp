#include "twophase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twophase {

double cfl_constant(const ModelParams& params) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < params.n(); ++i)
    c = std::max(c, 2.0 * std::cosh(0.5 * std::abs(std::log(params.beta_star()[i]))));
  return c;
}

double cfl_time_step(double dx, const ModelParams& params, double safety) {
  return safety * dx / (2.0 * cfl_constant(params));
}

namespace {

// Edge e separates slots e and e+1. Returns the phase of a bulk edge, or
// nothing for the interface edge.
std::optional<Phase> edge_phase(const MovingMesh& mesh, int e) {
  if (auto only = mesh.single_phase()) return only;
  const int interface_edge = mesh.interface_index() - 1;
  if (e == interface_edge) return std::nullopt;
  return e < interface_edge ? Phase::solid : Phase::gas;
}

Vec bulk_flux(Phase phase, const Vec& left, const Vec& right, double dx, const ModelParams& params) {
  return phase == Phase::solid ? solid_flux(left, right, dx, params) : gas_flux(left, right, dx, params);
}

FluxDerivative bulk_flux_derivative(Phase phase, const Vec& left, const Vec& right, double dx,
                                    const ModelParams& params) {
  return phase == Phase::solid ? solid_flux_derivative(left, right, dx, params)
                               : gas_flux_derivative(left, right, dx, params);
}

void check_sizes(const CellField& c, const SimState& given) {
  if (c.size() != given.c.size() || static_cast<int>(c.size()) != given.mesh.cells())
    throw GeometryError("field and mesh sizes differ");
}

}  // namespace

std::vector<double> trial_widths(const CellField& c, const SimState& given, double dt,
                                 const ModelParams& params) {
  std::vector<double> widths = given.mesh.widths();
  if (!given.mesh.two_phase()) return widths;
  const auto s = static_cast<std::size_t>(given.mesh.interface_index() - 1);
  const double shift = dt * interface_flux(c[s], c[s + 1], params).f_tilde.sum();
  widths[s] += shift;
  widths[s + 1] -= shift;
  return widths;
}

CellField residual(const CellField& c, const SimState& given, double dt, const ModelParams& params) {
  check_sizes(c, given);
  const MovingMesh& mesh = given.mesh;
  const int cells = mesh.cells();
  const double dx = mesh.dx();
  const std::vector<double> widths = trial_widths(c, given, dt, params);

  CellField r(c.size());
  for (int k = 0; k < cells; ++k) {
    const auto u = static_cast<std::size_t>(k);
    r[u] = (widths[u] * c[u] - mesh.width(k) * given.c[u]) / dt;
  }
  for (int e = 0; e + 1 < cells; ++e) {
    const auto l = static_cast<std::size_t>(e);
    if (auto phase = edge_phase(mesh, e)) {
      const Vec j = bulk_flux(*phase, c[l], c[l + 1], dx, params);
      r[l] += j;
      r[l + 1] -= j;
    } else {
      const InterfaceFlux f = interface_flux(c[l], c[l + 1], params);
      r[l] += f.j_solid;
      r[l + 1] -= f.j_gas;
    }
  }
  return r;
}

BlockTridiagonal::BlockTridiagonal(int cells, int species)
    : lower(static_cast<std::size_t>(cells), Mat::Zero(species, species)),
      diag(static_cast<std::size_t>(cells), Mat::Zero(species, species)),
      upper(static_cast<std::size_t>(cells), Mat::Zero(species, species)) {}

Mat BlockTridiagonal::to_dense() const {
  const int cells = this->cells();
  const Eigen::Index n = diag.front().rows();
  Mat dense = Mat::Zero(cells * n, cells * n);
  for (int k = 0; k < cells; ++k) {
    const auto u = static_cast<std::size_t>(k);
    dense.block(k * n, k * n, n, n) = diag[u];
    if (k > 0) dense.block(k * n, (k - 1) * n, n, n) = lower[u];
    if (k + 1 < cells) dense.block(k * n, (k + 1) * n, n, n) = upper[u];
  }
  return dense;
}

CellField BlockTridiagonal::solve(const CellField& rhs) const {
  const auto cells = diag.size();
  if (rhs.size() != cells) throw GeometryError("right-hand side has the wrong number of cells");
  std::vector<Eigen::PartialPivLU<Mat>> pivots;
  pivots.reserve(cells);
  CellField y(cells);

  auto factor = [&](const Mat& block, std::size_t k) {
    pivots.emplace_back(block);
    const double rcond = pivots.back().rcond();
    if (!(rcond > 1e-15)) {
      std::ostringstream os;
      os << "singular pivot block at cell " << k << " (rcond " << rcond << ")";
      throw NumericalError(os.str());
    }
  };

  factor(diag[0], 0);
  y[0] = rhs[0];
  for (std::size_t k = 1; k < cells; ++k) {
    const Mat coupling = pivots[k - 1].solve(upper[k - 1]);
    factor(diag[k] - lower[k] * coupling, k);
    y[k] = rhs[k] - lower[k] * pivots[k - 1].solve(y[k - 1]);
  }
  CellField x(cells);
  x[cells - 1] = pivots[cells - 1].solve(y[cells - 1]);
  for (std::size_t k = cells - 1; k-- > 0;) x[k] = pivots[k].solve(y[k] - upper[k] * x[k + 1]);
  return x;
}

BlockTridiagonal jacobian(const CellField& c, const SimState& given, double dt, const ModelParams& params) {
  check_sizes(c, given);
  const MovingMesh& mesh = given.mesh;
  const int cells = mesh.cells();
  const int n = params.n();
  const double dx = mesh.dx();
  const std::vector<double> widths = trial_widths(c, given, dt, params);

  BlockTridiagonal jac(cells, n);
  for (int k = 0; k < cells; ++k)
    jac.diag[static_cast<std::size_t>(k)].diagonal().array() += widths[static_cast<std::size_t>(k)] / dt;

  const Vec ones = Vec::Ones(n);
  for (int e = 0; e + 1 < cells; ++e) {
    const auto l = static_cast<std::size_t>(e);
    if (auto phase = edge_phase(mesh, e)) {
      const FluxDerivative d = bulk_flux_derivative(*phase, c[l], c[l + 1], dx, params);
      jac.diag[l] += d.d_left;
      jac.upper[l] += d.d_right;
      jac.lower[l + 1] -= d.d_left;
      jac.diag[l + 1] -= d.d_right;
      continue;
    }
    const InterfaceFluxDerivative d = interface_flux_derivative(c[l], c[l + 1], params);
    jac.diag[l] += d.j_solid.d_left;
    jac.upper[l] += d.j_solid.d_right;
    jac.lower[l + 1] -= d.j_gas.d_left;
    jac.diag[l + 1] -= d.j_gas.d_right;
    // The cut-cell widths move with X~(c): d(W~ c)/dt picks up c (1^T dF~).
    const Mat dsum_left = ones.transpose() * d.f_tilde.d_left;
    const Mat dsum_right = ones.transpose() * d.f_tilde.d_right;
    jac.diag[l] += c[l] * dsum_left;
    jac.upper[l] += c[l] * dsum_right;
    jac.lower[l + 1] -= c[l + 1] * dsum_left;
    jac.diag[l + 1] -= c[l + 1] * dsum_right;
  }
  return jac;
}

Mat finite_difference_jacobian(const CellField& c, const SimState& given, double dt,
                               const ModelParams& params, double h, DifferenceScheme scheme) {
  const int cells = static_cast<int>(c.size());
  const int n = params.n();
  Mat jac(cells * n, cells * n);
  auto flatten = [&](const CellField& f) {
    Vec v(cells * n);
    for (int k = 0; k < cells; ++k) v.segment(k * n, n) = f[static_cast<std::size_t>(k)];
    return v;
  };
  const Vec base = flatten(residual(c, given, dt, params));
  for (int k = 0; k < cells; ++k) {
    for (int i = 0; i < n; ++i) {
      CellField minus = c;
      minus[static_cast<std::size_t>(k)][i] -= h;
      const Vec r_minus = flatten(residual(minus, given, dt, params));
      if (scheme == DifferenceScheme::backward) {
        jac.col(k * n + i) = (base - r_minus) / h;
      } else {
        CellField plus = c;
        plus[static_cast<std::size_t>(k)][i] += h;
        jac.col(k * n + i) = (flatten(residual(plus, given, dt, params)) - r_minus) / (2.0 * h);
      }
    }
  }
  return jac;
}

NewtonResult newton_solve(const SimState& given, double dt, const ModelParams& params,
                          const StepperConfig& config) {
  NewtonResult out;
  out.c = given.c;
  try {
    for (int it = 1; it <= config.newton_max_iter; ++it) {
      CellField r = residual(out.c, given, dt, params);
      for (auto& v : r) v = -v;
      const CellField delta = jacobian(out.c, given, dt, params).solve(r);
      double update = 0.0;
      for (std::size_t k = 0; k < delta.size(); ++k) {
        out.c[k] += delta[k];
        update = std::max(update, delta[k].lpNorm<Eigen::Infinity>());
        if (!out.c[k].allFinite()) {
          out.failure = "non-finite Newton iterate";
          out.iterations = it;
          return out;
        }
      }
      out.iterations = it;
      out.last_update = update;
      if (update <= config.newton_tol) {
        out.converged = true;
        break;
      }
    }
  } catch (const NumericalError& e) {
    out.failure = e.what();
    return out;
  } catch (const DomainError& e) {
    out.failure = e.what();
    return out;
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "no convergence in " << config.newton_max_iter << " iterations (last update "
       << out.last_update << ")";
    out.failure = os.str();
    return out;
  }
  const std::vector<double> widths = trial_widths(out.c, given, dt, params);
  if (std::any_of(widths.begin(), widths.end(), [](double w) { return !(w > 0.0); })) {
    out.converged = false;
    out.failure = "nonpositive cut-cell width at the Newton root";
  }
  return out;
}

StepResult advance(const SimState& state, double dt_try, const ModelParams& params,
                   const StepperConfig& config) {
  if (!(dt_try > 0.0)) throw SolverError("time step must be positive");
  std::string last_failure;
  double dt = dt_try;
  for (int halvings = 0; halvings <= config.max_halvings; ++halvings, dt *= 0.5) {
    NewtonResult newton = newton_solve(state, dt, params, config);
    if (!newton.converged) {
      last_failure = newton.failure;
      continue;
    }
    StepResult out{state, newton.c, state.mesh.interface_position(), dt, newton.iterations, halvings};
    out.state.t = state.t + dt;
    if (!state.mesh.two_phase()) {
      out.state.c = std::move(newton.c);
      return out;
    }
    const auto s = static_cast<std::size_t>(state.mesh.interface_index() - 1);
    out.X_new = state.mesh.interface_position() +
                dt * butler_volmer_flux(newton.c[s], newton.c[s + 1], params).sum();
    try {
      PostProcessResult post = post_process(newton.c, out.X_new, state.mesh);
      out.state.c = std::move(post.c);
      out.state.mesh = std::move(post.mesh);
      out.crossed = post.crossed;
      out.pinned = post.pinned;
      return out;
    } catch (const GeometryError& e) {
      last_failure = e.what();
    }
  }
  std::ostringstream os;
  os << "step at t = " << state.t << " failed after " << config.max_halvings
     << " halvings (dt = " << dt_try << "): " << last_failure;
  throw SolverError(os.str());
}

TimeStepper::TimeStepper(ModelParams params, StepperConfig config, SimState initial)
    : params_(std::move(params)), config_(config), state_(std::move(initial)) {
  if (!(config_.dt_init > 0.0)) throw DomainError("dt_init must be positive");
  if (!(config_.cfl_safety > 0.0 && config_.cfl_safety < 1.0))
    throw DomainError("cfl_safety must lie in (0,1)");
  dt_cap_ = std::min(config_.dt_init, cfl_time_step(state_.mesh.dx(), params_, config_.cfl_safety));
  dt_ = dt_cap_;
}

StepResult TimeStepper::step(double t_stop) {
  const double remaining = t_stop - state_.t;
  if (!(remaining > 0.0)) throw SolverError("step requested past the stop time");
  // Avoid leaving a sliver step just before t_stop.
  double dt_try = dt_;
  if (remaining <= dt_try * (1.0 + 1e-9)) dt_try = remaining;

  StepResult result = advance(state_, dt_try, params_, config_);
  if (remaining <= dt_try * (1.0 + 1e-9) && result.halvings == 0) result.state.t = t_stop;
  state_ = result.state;

  if (result.halvings > 0) {
    dt_ = std::min(dt_, result.dt);
    streak_ = 0;
  } else if (dt_ < dt_cap_ && ++streak_ >= config_.growth_streak) {
    dt_ = std::min(2.0 * dt_, dt_cap_);
    streak_ = 0;
  }
  return result;
}

}  // namespace twophase
