#include "twophase/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace twophase {

std::string_view to_string(Phase phase) { return phase == Phase::solid ? "solid" : "gas"; }

namespace {

void validate_kappa(const Mat& kappa, std::string_view name, int n) {
  if (kappa.rows() != n || kappa.cols() != n) {
    std::ostringstream os;
    os << name << " must be " << n << "x" << n << ", got " << kappa.rows() << "x" << kappa.cols();
    throw DomainError(os.str());
  }
  for (int i = 0; i < n; ++i) {
    if (kappa(i, i) != 0.0) throw DomainError(std::string(name) + " must have a zero diagonal");
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(kappa(i, j) > 0.0) || !std::isfinite(kappa(i, j)))
        throw DomainError(std::string(name) + " off-diagonal entries must be finite and > 0");
      if (kappa(i, j) != kappa(j, i)) throw DomainError(std::string(name) + " must be symmetric");
    }
  }
}

double min_off_diagonal(const Mat& kappa) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kappa.rows(); ++i)
    for (int j = 0; j < kappa.cols(); ++j)
      if (i != j) m = std::min(m, kappa(i, j));
  return m;
}

Mat split_off_minimum(const Mat& kappa, double kmin) {
  Mat bar = kappa.array() - kmin;
  bar.diagonal().setZero();
  return bar;
}

}  // namespace

ModelParams::ModelParams(Mat kappa_s, Mat kappa_g, Vec mu_star_s, Vec mu_star_g)
    : kappa_s_(std::move(kappa_s)),
      kappa_g_(std::move(kappa_g)),
      mu_star_s_(std::move(mu_star_s)),
      mu_star_g_(std::move(mu_star_g)) {
  const int species = static_cast<int>(mu_star_s_.size());
  if (species < 2) throw DomainError("at least two species are required");
  if (mu_star_g_.size() != species) throw DomainError("mu_star_g has the wrong length");
  if (!mu_star_s_.allFinite() || !mu_star_g_.allFinite())
    throw DomainError("reference chemical potentials must be finite");
  validate_kappa(kappa_s_, "kappa_s", species);
  validate_kappa(kappa_g_, "kappa_g", species);

  beta_star_ = (mu_star_g_ - mu_star_s_).array().exp();
  sqrt_beta_ = beta_star_.array().sqrt();
  if ((beta_star_.array() <= 0.0).any() || !beta_star_.allFinite())
    throw DomainError("beta* must be finite and strictly positive");

  kappa_min_s_ = min_off_diagonal(kappa_s_);
  kappa_min_g_ = min_off_diagonal(kappa_g_);
  kappa_bar_s_ = split_off_minimum(kappa_s_, kappa_min_s_);
  kappa_bar_g_ = split_off_minimum(kappa_g_, kappa_min_g_);
}

ModelParams ModelParams::from_beta(Mat kappa_s, Mat kappa_g, const Vec& beta_star) {
  if ((beta_star.array() <= 0.0).any()) throw DomainError("beta* must be strictly positive");
  Vec mu_g = beta_star.array().log();
  return ModelParams(std::move(kappa_s), std::move(kappa_g), Vec::Zero(beta_star.size()), mu_g);
}

bool is_admissible(const Composition& c, double tol) {
  return (c.array() >= -tol).all() && std::abs(c.sum() - 1.0) <= tol;
}

void check_admissible(const Composition& c, double tol) {
  if (!is_admissible(c, tol)) {
    std::ostringstream os;
    os << "composition is not admissible (min " << c.minCoeff() << ", sum " << c.sum() << ")";
    throw DomainError(os.str());
  }
}

double free_energy_density(const Composition& c, Phase phase, const ModelParams& params) {
  const Vec& mu_star = params.mu_star(phase);
  if (c.size() != mu_star.size()) throw DomainError("composition has the wrong length");
  double h = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double ci = c[i];
    if (ci < 0.0) throw DomainError("free energy density of a negative concentration");
    // 0 log 0 = 0
    const double entropy = ci > 0.0 ? ci * std::log(ci) : 0.0;
    h += entropy + ci * mu_star[i] - ci + 1.0;
  }
  return h;
}

Vec chemical_potential(const Composition& c, Phase phase, const ModelParams& params) {
  const Vec& mu_star = params.mu_star(phase);
  if (c.size() != mu_star.size()) throw DomainError("composition has the wrong length");
  if ((c.array() <= 0.0).any())
    throw DomainError("chemical potential requires strictly positive concentrations");
  return c.array().log().matrix() + mu_star;
}

double pressure(const Composition& c, Phase phase, const ModelParams& params) {
  return c.dot(chemical_potential(c, phase, params)) - free_energy_density(c, phase, params);
}

Vec butler_volmer_flux(const Composition& c_s, const Composition& c_g, const ModelParams& params) {
  const Vec& sb = params.sqrt_beta_star();
  return sb.cwiseProduct(c_g) - c_s.cwiseQuotient(sb);
}

double dissipation_potential(double x) {
  // cosh(x/2) - 1 = 2 sinh^2(x/4), exact near zero
  const double s = std::sinh(0.25 * x);
  return 8.0 * s * s;
}

double dissipation_potential_derivative(double x) { return 2.0 * std::sinh(0.5 * x); }

double dual_dissipation_potential(double z) {
  // log((z + sqrt(z^2+4))/2) = asinh(z/2); 4 - 2 sqrt(z^2+4) = -2 z^2 / (sqrt(z^2+4) + 2)
  const double root = std::hypot(z, 2.0);
  return 2.0 * z * std::asinh(0.5 * z) - 2.0 * z * z / (root + 2.0);
}

Mat size_exclusion_matrix(const Mat& coeffs, const Vec& u) {
  const Eigen::Index n = u.size();
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      diag += coeffs(i, j) * u[j];
      a(i, j) = -coeffs(i, j) * u[i];
    }
    a(i, i) = diag;
  }
  return a;
}

Mat assemble_A_s(const Vec& u, const ModelParams& params) {
  return size_exclusion_matrix(params.kappa(Phase::solid), u);
}

Mat assemble_A_g_tilde(const Vec& u, const ModelParams& params) {
  return size_exclusion_matrix(params.kappa(Phase::gas), u);
}

Mat modified_A_s(const Vec& u, const ModelParams& params) {
  Mat a = size_exclusion_matrix(params.kappa_bar(Phase::solid), u);
  a.diagonal().array() += params.kappa_min(Phase::solid);
  return a;
}

Mat modified_A_g_friction(const Vec& u, const ModelParams& params) {
  Mat a = size_exclusion_matrix(params.kappa_bar(Phase::gas), u);
  a.diagonal().array() += params.kappa_min(Phase::gas);
  return a;
}

Mat mobility(const Composition& u, Phase phase, const ModelParams& params) {
  if ((u.array() <= 0.0).any()) throw DomainError("mobility requires strictly positive entries");
  const Mat diag_u = u.asDiagonal();
  if (phase == Phase::solid) return modified_A_s(u, params) * diag_u;

  Eigen::PartialPivLU<Mat> lu(modified_A_g_friction(u, params));
  Mat m = lu.solve(diag_u);
  if (!m.allFinite()) throw NumericalError("singular Stefan-Maxwell friction matrix");
  return m;
}

}  // namespace twophase
