#pragma once

#include <utility>

#include "twophase/model.hpp"

namespace twophase {

/// Logarithmic mean (a - b) / (log a - log b); a when a == b > 0; 0 when min(a,b) <= 0.
double log_mean(double a, double b);

/// Partial derivatives (d/da, d/db) of log_mean. Zero where either argument is <= 0.
std::pair<double, double> log_mean_gradient(double a, double b);

/// Cell values on both sides of an edge plus the log-mean edge concentration.
struct EdgeState {
  Vec left, right, edge_conc;

  EdgeState(Vec left_values, Vec right_values);
};

/// Truncation x_i^+ / max(1, sum_j x_j^+).
Vec diamond(const Vec& x);
/// Jacobian of `diamond`. On the kink sum_j x_j^+ = 1 (to a few ulps) the identity branch is used.
Mat diamond_jacobian(const Vec& x);

/// Pair of Jacobian blocks of an edge flux with respect to the left and right cell.
struct FluxDerivative {
  Mat d_left, d_right;
};

/// Solid TPFA flux: dx J = -(A_bar_s(u) + kappa_min_s I) (right - left), u the log-mean.
Vec solid_flux(const Vec& left, const Vec& right, double dx, const ModelParams& params);
FluxDerivative solid_flux_derivative(const Vec& left, const Vec& right, double dx,
                                     const ModelParams& params);

/// Stefan-Maxwell flux: solves dx (A_bar_g(u) + kappa_min_g I) J = -(right - left).
/// Throws NumericalError if the friction matrix is singular.
Vec gas_flux(const Vec& left, const Vec& right, double dx, const ModelParams& params);
FluxDerivative gas_flux_derivative(const Vec& left, const Vec& right, double dx,
                                   const ModelParams& params);

/// Truncated Butler-Volmer flux across the interface and the flux it induces on
/// each side. `left` is the solid cut cell, `right` the gas cut cell.
struct InterfaceFlux {
  Vec f_tilde;  ///< sqrt(beta) right^diamond - left^diamond / sqrt(beta)
  Vec j_solid;  ///< -(sum left) f_tilde
  Vec j_gas;    ///< -(sum right) f_tilde
};

InterfaceFlux interface_flux(const Vec& left, const Vec& right, const ModelParams& params);

struct InterfaceFluxDerivative {
  FluxDerivative f_tilde, j_solid, j_gas;
};

InterfaceFluxDerivative interface_flux_derivative(const Vec& left, const Vec& right,
                                                  const ModelParams& params);

}  // namespace twophase
