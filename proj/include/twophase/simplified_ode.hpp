#pragma once

#include <vector>

#include <Eigen/Dense>

#include "twophase/model.hpp"

namespace twophase {

/// Space-homogeneous reduction: solid masses m_s with X = sum m_s, and total masses m0.
struct MassState {
  Vec m_s;
  Vec m0;
  double X = 0.0;

  MassState() = default;
  MassState(Vec solid_mass, Vec total_mass);

  Composition c_solid() const { return m_s / X; }
  Composition c_gas() const { return (m0 - m_s) / (1.0 - X); }
};

/// 0 < m_i < m0_i, 0 < X < 1 and X = sum m_i within 1e-12.
bool in_admissible_set(const MassState& state);

/// dm_s/dt = F(c_s, c_g). Throws DomainError outside the admissible set.
Vec ode_rhs(const MassState& state, const ModelParams& params);

/// H(m, X) = X h_s(m/X) + (1-X) h_g((m0-m)/(1-X)) on the open box, X independent of m.
double reduced_free_energy(const Vec& m, double X, const Vec& m0, const ModelParams& params);
double reduced_free_energy(const MassState& state, const ModelParams& params);

/// (dH/dm_1, ..., dH/dm_n, dH/dX) on the open box.
Vec reduced_free_energy_gradient(const Vec& m, double X, const Vec& m0, const ModelParams& params);

/// Dissipation sum_i sqrt(cs_i cg_i) (phi([mu_i]) + phi*(F_i / sqrt(cs_i cg_i))) = -dH/dt.
double dissipation_rate(const MassState& state, const ModelParams& params);

struct PsiHessian {
  Eigen::Matrix2d hessian;  ///< order (m, X)
  double determinant;
  double closed_form_determinant;
};

/// Hessian of psi_i(m, X) = X h(m/X) + (1-X) h((m0-m)/(1-X)) for one species.
/// The reference potentials only add affine terms, so they do not enter.
PsiHessian hessian_psi(double m, double X, double m0);

struct Trajectory {
  std::vector<double> t;
  std::vector<MassState> states;
  std::vector<double> energy;
  bool exited = false;    ///< a phase vanished (state left the admissible set)
  double exit_time = 0.0;
};

/// Classic fixed-step RK4 until t_end or until the state leaves the admissible
/// set (X outside [1e-10, 1 - 1e-10] or a mass outside (0, m0)).
Trajectory integrate(const MassState& state0, double t_end, double dt, const ModelParams& params);

}  // namespace twophase
