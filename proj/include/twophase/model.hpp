#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace twophase {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Concentration vector of one cell (length n). Admissible when every entry
/// is nonnegative and the entries sum to one.
using Composition = Vec;

enum class Phase { solid, gas };

std::string_view to_string(Phase phase);

/// Argument outside the domain of a thermodynamic function or mapping.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense linear solve failed (singular Stefan-Maxwell matrix, etc.).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters shared by both phases.
///
/// Cross-diffusion matrices are symmetric with zero diagonal and strictly
/// positive off-diagonal entries. The split kappa = kappa_bar + kappa_min is
/// computed once at construction, as is beta* = exp(mu*_g - mu*_s).
class ModelParams {
 public:
  ModelParams(Mat kappa_s, Mat kappa_g, Vec mu_star_s, Vec mu_star_g);

  /// Builds parameters from beta* directly, with mu*_s = 0 and mu*_g = log beta*.
  static ModelParams from_beta(Mat kappa_s, Mat kappa_g, const Vec& beta_star);

  int n() const { return static_cast<int>(mu_star_s_.size()); }

  const Mat& kappa(Phase phase) const { return phase == Phase::solid ? kappa_s_ : kappa_g_; }
  const Mat& kappa_bar(Phase phase) const {
    return phase == Phase::solid ? kappa_bar_s_ : kappa_bar_g_;
  }
  double kappa_min(Phase phase) const {
    return phase == Phase::solid ? kappa_min_s_ : kappa_min_g_;
  }
  const Vec& mu_star(Phase phase) const {
    return phase == Phase::solid ? mu_star_s_ : mu_star_g_;
  }
  const Vec& beta_star() const { return beta_star_; }
  const Vec& sqrt_beta_star() const { return sqrt_beta_; }

  /// mu*_g - mu*_s, i.e. log beta*.
  Vec mu_star_jump() const { return mu_star_g_ - mu_star_s_; }

 private:
  Mat kappa_s_, kappa_g_;
  Vec mu_star_s_, mu_star_g_;
  Vec beta_star_, sqrt_beta_;
  double kappa_min_s_ = 0.0, kappa_min_g_ = 0.0;
  Mat kappa_bar_s_, kappa_bar_g_;
};

/// Throws DomainError unless `c` is entrywise >= -tol and sums to one within tol.
void check_admissible(const Composition& c, double tol = 1e-12);
bool is_admissible(const Composition& c, double tol = 1e-12);

// Thermodynamics ------------------------------------------------------------

/// h_alpha(c) = sum_i c_i (log c_i + mu*_i) - c_i + 1, with 0 log 0 = 0.
double free_energy_density(const Composition& c, Phase phase, const ModelParams& params);

/// mu_i = log c_i + mu*_i. Requires c > 0.
Vec chemical_potential(const Composition& c, Phase phase, const ModelParams& params);

/// pi_alpha(c) = c . mu_alpha(c) - h_alpha(c). Equals sum(c) - n.
double pressure(const Composition& c, Phase phase, const ModelParams& params);

/// Butler-Volmer interface flux F_i = sqrt(beta_i) c^g_i - c^s_i / sqrt(beta_i).
Vec butler_volmer_flux(const Composition& c_s, const Composition& c_g, const ModelParams& params);

// Dissipation potentials ----------------------------------------------------

/// phi(x) = 4 (cosh(x/2) - 1)
double dissipation_potential(double x);
/// phi'(x) = 2 sinh(x/2)
double dissipation_potential_derivative(double x);
/// Convex conjugate phi*(z) = 2 z asinh(z/2) - 2 sqrt(z^2 + 4) + 4.
double dual_dissipation_potential(double z);

// Matrix assembly -----------------------------------------------------------

/// Size-exclusion type matrix built from an arbitrary coefficient matrix:
/// diagonal sum_{j != i} k_ij u_j, off-diagonal -k_ij u_i.
Mat size_exclusion_matrix(const Mat& coeffs, const Vec& u);

/// A_s(u) with the full solid coefficients.
Mat assemble_A_s(const Vec& u, const ModelParams& params);
/// Stefan-Maxwell friction matrix A~_g(u) with the full gas coefficients.
Mat assemble_A_g_tilde(const Vec& u, const ModelParams& params);

/// Modified solid diffusion matrix: A_bar_s(u) + kappa_min_s I.
Mat modified_A_s(const Vec& u, const ModelParams& params);
/// Modified gas friction matrix: A_bar_g(u) + kappa_min_g I. Its inverse is the
/// modified gas diffusion matrix.
Mat modified_A_g_friction(const Vec& u, const ModelParams& params);

/// Modified mobility: A^_s(u) diag(u) for the solid, (A~^_g(u))^{-1} diag(u) for the gas.
Mat mobility(const Composition& u, Phase phase, const ModelParams& params);

}  // namespace twophase
