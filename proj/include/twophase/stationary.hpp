#pragma once

#include <string_view>

#include "twophase/mesh.hpp"
#include "twophase/model.hpp"

namespace twophase {

enum class StationaryKind { pure_solid, pure_gas, two_phase, indistinguishable_family };

std::string_view to_string(StationaryKind kind);

/// Stationary state of the continuous model for given total masses.
///
/// For `indistinguishable_family` every X in (0,1) is stationary with
/// c_s = c_g = m0, so `X_bar` carries no information and is left NaN.
///
/// When the two-phase condition fails both trivial pure states are stationary.
/// `kind` then names the one the interface drifts towards from a well-mixed
/// start: pure_solid if sum m0_i / beta_i <= 1 (the gas cannot balance the
/// solid), pure_gas otherwise.
struct StationaryState {
  StationaryKind kind;
  Composition c_bar_s, c_bar_g;
  double X_bar;

  /// True if the two-phase condition failed and only the pure states exist.
  bool only_pure_states() const {
    return kind == StationaryKind::pure_solid || kind == StationaryKind::pure_gas;
  }
};

/// m0_i = sum_K width_K c_{i,K}.
Vec initial_mass(const CellField& c0, const MovingMesh& mesh);

/// min(sum m0_i beta_i, sum m0_i / beta_i) > 1. Throws DomainError on nonpositive mass.
bool two_phase_condition(const Vec& m0, const Vec& beta);

/// phi(X) = sum_i m0_i / (beta_i X + 1 - X) - 1.
double phi_of_X(double X, const Vec& m0, const Vec& beta);
double phi_prime_of_X(double X, const Vec& m0, const Vec& beta);

/// Classifies the stationary states and computes the two-phase one when it exists.
/// Throws NumericalError if the root solve fails to converge.
StationaryState solve_stationary(const Vec& m0, const Vec& beta);

/// The trivial stationary states (m0, 0, 1) and (0, m0, 0).
StationaryState pure_solid_state(const Vec& m0);
StationaryState pure_gas_state(const Vec& m0);

}  // namespace twophase
