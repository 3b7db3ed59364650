#include "twophase/simplified_ode.hpp"

#include <cmath>

namespace twophase {

MassState::MassState(Vec solid_mass, Vec total_mass)
    : m_s(std::move(solid_mass)), m0(std::move(total_mass)), X(m_s.sum()) {
  if (m_s.size() != m0.size()) throw DomainError("solid and total masses have different lengths");
}

namespace {

constexpr double kExtinction = 1e-10;

bool inside_box(const Vec& m, double X, const Vec& m0) {
  return X > 0.0 && X < 1.0 && (m.array() > 0.0).all() && (m.array() < m0.array()).all();
}

void check_box(const Vec& m, double X, const Vec& m0) {
  if (m.size() != m0.size()) throw DomainError("solid and total masses have different lengths");
  if (!inside_box(m, X, m0)) throw DomainError("mass state outside the open box");
}

}  // namespace

bool in_admissible_set(const MassState& state) {
  return inside_box(state.m_s, state.X, state.m0) && std::abs(state.m_s.sum() - state.X) <= 1e-12;
}

Vec ode_rhs(const MassState& state, const ModelParams& params) {
  if (!in_admissible_set(state)) throw DomainError("mass state outside the admissible set");
  return butler_volmer_flux(state.c_solid(), state.c_gas(), params);
}

double reduced_free_energy(const Vec& m, double X, const Vec& m0, const ModelParams& params) {
  check_box(m, X, m0);
  const Composition c_s = m / X;
  const Composition c_g = (m0 - m) / (1.0 - X);
  return X * free_energy_density(c_s, Phase::solid, params) +
         (1.0 - X) * free_energy_density(c_g, Phase::gas, params);
}

double reduced_free_energy(const MassState& state, const ModelParams& params) {
  return reduced_free_energy(state.m_s, state.X, state.m0, params);
}

Vec reduced_free_energy_gradient(const Vec& m, double X, const Vec& m0, const ModelParams& params) {
  check_box(m, X, m0);
  const Composition c_s = m / X;
  const Composition c_g = (m0 - m) / (1.0 - X);
  const Eigen::Index n = m.size();
  Vec grad(n + 1);
  grad.head(n) = chemical_potential(c_s, Phase::solid, params) - chemical_potential(c_g, Phase::gas, params);
  // d/dX [X h_s(m/X)] = -pi_s, d/dX [(1-X) h_g(.)] = pi_g
  grad[n] = pressure(c_g, Phase::gas, params) - pressure(c_s, Phase::solid, params);
  return grad;
}

double dissipation_rate(const MassState& state, const ModelParams& params) {
  const Composition c_s = state.c_solid();
  const Composition c_g = state.c_gas();
  const Vec jump = chemical_potential(c_g, Phase::gas, params) - chemical_potential(c_s, Phase::solid, params);
  const Vec flux = butler_volmer_flux(c_s, c_g, params);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < c_s.size(); ++i) {
    const double g = std::sqrt(c_s[i] * c_g[i]);
    rate += g * (dissipation_potential(jump[i]) + dual_dissipation_potential(flux[i] / g));
  }
  return rate;
}

PsiHessian hessian_psi(double m, double X, double m0) {
  if (!(X > 0.0 && X < 1.0 && m > 0.0 && m < m0)) throw DomainError("hessian_psi needs an interior point");
  const double m_g = m0 - m;
  Eigen::Matrix2d h;
  h(0, 0) = 1.0 / m + 1.0 / m_g;
  h(1, 1) = m / (X * X) + m_g / ((1.0 - X) * (1.0 - X));
  h(0, 1) = h(1, 0) = -1.0 / X - 1.0 / (1.0 - X);
  const double c_s = m / X;
  const double c_g = m_g / (1.0 - X);
  const double closed = (c_s - c_g) * (c_s - c_g) / (c_s * c_g * X * (1.0 - X));
  return {h, h.determinant(), closed};
}

Trajectory integrate(const MassState& state0, double t_end, double dt, const ModelParams& params) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw DomainError("integrate needs dt > 0 and t_end >= 0");
  if (!in_admissible_set(state0)) throw DomainError("initial mass state outside the admissible set");

  Trajectory traj;
  MassState state = state0;
  double t = 0.0;
  traj.t.push_back(t);
  traj.states.push_back(state);
  traj.energy.push_back(reduced_free_energy(state, params));

  auto usable = [](const MassState& s) {
    return in_admissible_set(s) && s.X >= kExtinction && s.X <= 1.0 - kExtinction;
  };
  auto shifted = [&](const Vec& dm) { return MassState(state.m_s + dm, state.m0); };

  while (t < t_end) {
    const double h = std::min(dt, t_end - t);
    if (h <= 1e-15 * std::max(1.0, t_end)) break;
    // Stages that leave the admissible set mean the phase is vanishing within this step.
    bool ok = true;
    Vec k1, k2, k3, k4;
    k1 = ode_rhs(state, params);
    MassState s2 = shifted(0.5 * h * k1);
    if ((ok = usable(s2))) k2 = ode_rhs(s2, params);
    MassState s3 = ok ? shifted(0.5 * h * k2) : state;
    if (ok && (ok = usable(s3))) k3 = ode_rhs(s3, params);
    MassState s4 = ok ? shifted(h * k3) : state;
    if (ok && (ok = usable(s4))) k4 = ode_rhs(s4, params);
    MassState next = ok ? shifted(h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) : state;
    if (!ok || !usable(next)) {
      traj.exited = true;
      traj.exit_time = t + h;
      break;
    }
    state = std::move(next);
    t += h;
    traj.t.push_back(t);
    traj.states.push_back(state);
    traj.energy.push_back(reduced_free_energy(state, params));
  }
  return traj;
}

}  // namespace twophase
