#include "twophase/stationary.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace twophase {

std::string_view to_string(StationaryKind kind) {
  switch (kind) {
    case StationaryKind::pure_solid: return "pure_solid";
    case StationaryKind::pure_gas: return "pure_gas";
    case StationaryKind::two_phase: return "two_phase";
    case StationaryKind::indistinguishable_family: return "indistinguishable_family";
  }
  return "unknown";
}

Vec initial_mass(const CellField& c0, const MovingMesh& mesh) { return total_mass(c0, mesh.widths()); }

namespace {

void check_masses(const Vec& m0, const Vec& beta) {
  if (m0.size() != beta.size()) throw DomainError("mass and beta* have different lengths");
  if ((m0.array() <= 0.0).any()) throw DomainError("stationary analysis requires positive masses");
  if ((beta.array() <= 0.0).any()) throw DomainError("beta* must be strictly positive");
}

double denominator(double X, double beta) {
  const double d = beta * X + 1.0 - X;
  if (!(d > 0.0)) throw DomainError("nonpositive denominator in phi");
  return d;
}

}  // namespace

bool two_phase_condition(const Vec& m0, const Vec& beta) {
  check_masses(m0, beta);
  const double with_beta = m0.dot(beta);
  const double with_inverse = m0.dot(beta.cwiseInverse());
  return std::min(with_beta, with_inverse) > 1.0;
}

double phi_of_X(double X, const Vec& m0, const Vec& beta) {
  if (!(X >= 0.0 && X <= 1.0)) throw DomainError("phi is defined on [0,1]");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m0.size(); ++i) sum += m0[i] / denominator(X, beta[i]);
  return sum - 1.0;
}

double phi_prime_of_X(double X, const Vec& m0, const Vec& beta) {
  if (!(X >= 0.0 && X <= 1.0)) throw DomainError("phi is defined on [0,1]");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m0.size(); ++i) {
    const double d = denominator(X, beta[i]);
    sum -= (beta[i] - 1.0) * m0[i] / (d * d);
  }
  return sum;
}

StationaryState pure_solid_state(const Vec& m0) {
  return {StationaryKind::pure_solid, m0, Vec::Zero(m0.size()), 1.0};
}

StationaryState pure_gas_state(const Vec& m0) {
  return {StationaryKind::pure_gas, Vec::Zero(m0.size()), m0, 0.0};
}

StationaryState solve_stationary(const Vec& m0, const Vec& beta) {
  check_masses(m0, beta);
  if ((beta.array() == 1.0).all())
    return {StationaryKind::indistinguishable_family, m0, m0, std::numeric_limits<double>::quiet_NaN()};

  if (!two_phase_condition(m0, beta))
    return m0.dot(beta.cwiseInverse()) <= 1.0 ? pure_solid_state(m0) : pure_gas_state(m0);

  // phi is strictly convex with phi(0) = 0, phi'(0) < 0 and phi(1) > 0, so the
  // nontrivial root is bracketed by [eps, 1 - eps] and phi < 0 to its left.
  constexpr double eps = 1e-12;
  double lo = eps, hi = 1.0 - eps;
  if (!(phi_of_X(lo, m0, beta) < 0.0) || !(phi_of_X(hi, m0, beta) > 0.0))
    throw NumericalError("stationary root is not bracketed");

  double x = 0.5;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double f = phi_of_X(x, m0, beta);
    if (f == 0.0) {
      converged = true;
      break;
    }
    (f < 0.0 ? lo : hi) = x;
    const double df = phi_prime_of_X(x, m0, beta);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool small_step = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x;
    x = next;
    if (small_step || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) {
      converged = true;
      break;
    }
  }
  if (!converged || std::abs(phi_of_X(x, m0, beta)) > 1e-14) {
    std::ostringstream os;
    os << "stationary root solve did not converge (X = " << x << ", phi = " << phi_of_X(x, m0, beta) << ")";
    throw NumericalError(os.str());
  }

  Composition c_g(m0.size());
  for (Eigen::Index i = 0; i < m0.size(); ++i) c_g[i] = m0[i] / denominator(x, beta[i]);
  Composition c_s = beta.cwiseProduct(c_g);
  return {StationaryKind::two_phase, std::move(c_s), std::move(c_g), x};
}

}  // namespace twophase
