#include "twophase/fluxes.hpp"

#include <cmath>
#include <limits>

namespace twophase {

namespace {

// Below this relative gap the log-mean is evaluated from its Taylor expansion
// in u = b/a - 1; above it the log1p form is accurate to a few ulps.
constexpr double kSeriesGap = 1e-3;

// g(u) = u / log(1+u) and its derivative, truncated after the u^5 / u^4 terms.
double log_mean_series(double u) {
  return 1.0 + u * (0.5 + u * (-1.0 / 12.0 + u * (1.0 / 24.0 + u * (-19.0 / 720.0 + u * 3.0 / 160.0))));
}

double log_mean_series_derivative(double u) {
  return 0.5 + u * (-1.0 / 6.0 + u * (1.0 / 8.0 + u * (-19.0 / 180.0 + u * 3.0 / 32.0)));
}

}  // namespace

double log_mean(double a, double b) {
  if (std::min(a, b) <= 0.0) return 0.0;
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  const double u = (b - a) / a;
  if (std::abs(u) <= kSeriesGap) return a * log_mean_series(u);
  return (b - a) / std::log1p(u);
}

std::pair<double, double> log_mean_gradient(double a, double b) {
  if (std::min(a, b) <= 0.0) return {0.0, 0.0};
  if (a > b) {
    const auto [db, da] = log_mean_gradient(b, a);
    return {da, db};
  }
  const double u = (b - a) / a;
  if (std::abs(u) <= kSeriesGap) {
    // L = a g(t), t = b/a:  dL/da = g - t g',  dL/db = g'
    const double g = log_mean_series(u);
    const double dg = log_mean_series_derivative(u);
    return {g - (1.0 + u) * dg, dg};
  }
  const double ell = -std::log1p(u);  // log a - log b
  const double mean = (a - b) / ell;
  return {(1.0 - mean / a) / ell, (mean / b - 1.0) / ell};
}

EdgeState::EdgeState(Vec left_values, Vec right_values)
    : left(std::move(left_values)), right(std::move(right_values)), edge_conc(left.size()) {
  if (left.size() != right.size()) throw DomainError("edge values have different lengths");
  for (Eigen::Index i = 0; i < left.size(); ++i) edge_conc[i] = log_mean(left[i], right[i]);
}

Vec diamond(const Vec& x) {
  const Vec positive = x.cwiseMax(0.0);
  return positive / std::max(1.0, positive.sum());
}

Mat diamond_jacobian(const Vec& x) {
  const Eigen::Index n = x.size();
  const Vec positive = x.cwiseMax(0.0);
  Vec active(n);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = x[i] > 0.0 ? 1.0 : 0.0;
  const double total = positive.sum();
  // Unit sums computed in floating point land a few ulps either side of the kink.
  if (total <= 1.0 + 8.0 * std::numeric_limits<double>::epsilon()) return active.asDiagonal();
  Mat jac = Mat(active.asDiagonal()) / total;
  jac -= positive * active.transpose() / (total * total);
  return jac;
}

namespace {

Vec edge_concentration(const Vec& left, const Vec& right) {
  Vec u(left.size());
  for (Eigen::Index i = 0; i < left.size(); ++i) u[i] = log_mean(left[i], right[i]);
  return u;
}

// Columns d u_k / d left_k and d u_k / d right_k of the (diagonal) log-mean Jacobian.
std::pair<Vec, Vec> edge_concentration_gradient(const Vec& left, const Vec& right) {
  Vec dl(left.size()), dr(left.size());
  for (Eigen::Index i = 0; i < left.size(); ++i) {
    const auto [ga, gb] = log_mean_gradient(left[i], right[i]);
    dl[i] = ga;
    dr[i] = gb;
  }
  return {dl, dr};
}

}  // namespace

Vec solid_flux(const Vec& left, const Vec& right, double dx, const ModelParams& params) {
  const Vec u = edge_concentration(left, right);
  return -(modified_A_s(u, params) * (right - left)) / dx;
}

// With S(v) = size_exclusion_matrix(kappa_bar, v), the map u -> A_bar(u) v has
// Jacobian -S(v). Hence for dx J = -A^(u) Dc:
//   d(dx J) = -A^(u) d(Dc) + S(Dc) du.
FluxDerivative solid_flux_derivative(const Vec& left, const Vec& right, double dx,
                                     const ModelParams& params) {
  const Vec u = edge_concentration(left, right);
  const auto [du_left, du_right] = edge_concentration_gradient(left, right);
  const Mat a_hat = modified_A_s(u, params);
  const Mat s = size_exclusion_matrix(params.kappa_bar(Phase::solid), right - left);
  return {(a_hat + s * du_left.asDiagonal()) / dx, (-a_hat + s * du_right.asDiagonal()) / dx};
}

Vec gas_flux(const Vec& left, const Vec& right, double dx, const ModelParams& params) {
  const Vec u = edge_concentration(left, right);
  Eigen::PartialPivLU<Mat> lu(modified_A_g_friction(u, params));
  Vec j = lu.solve(-(right - left) / dx);
  if (!j.allFinite()) throw NumericalError("singular Stefan-Maxwell friction matrix");
  return j;
}

// A~(u) J = -Dc / dx  =>  A~ dJ = -d(Dc) / dx + S(J) du.
FluxDerivative gas_flux_derivative(const Vec& left, const Vec& right, double dx,
                                   const ModelParams& params) {
  const Eigen::Index n = left.size();
  const Vec u = edge_concentration(left, right);
  const auto [du_left, du_right] = edge_concentration_gradient(left, right);
  Eigen::PartialPivLU<Mat> lu(modified_A_g_friction(u, params));
  const Vec j = lu.solve(-(right - left) / dx);
  if (!j.allFinite()) throw NumericalError("singular Stefan-Maxwell friction matrix");
  const Mat s = size_exclusion_matrix(params.kappa_bar(Phase::gas), j);
  const Mat id = Mat::Identity(n, n) / dx;
  return {lu.solve(id + s * du_left.asDiagonal()), lu.solve(-id + s * du_right.asDiagonal())};
}

InterfaceFlux interface_flux(const Vec& left, const Vec& right, const ModelParams& params) {
  const Vec& sb = params.sqrt_beta_star();
  Vec f = sb.cwiseProduct(diamond(right)) - diamond(left).cwiseQuotient(sb);
  Vec js = -left.sum() * f;
  Vec jg = -right.sum() * f;
  return {std::move(f), std::move(js), std::move(jg)};
}

InterfaceFluxDerivative interface_flux_derivative(const Vec& left, const Vec& right,
                                                  const ModelParams& params) {
  const Vec& sb = params.sqrt_beta_star();
  const Vec f = sb.cwiseProduct(diamond(right)) - diamond(left).cwiseQuotient(sb);
  const Mat df_left = -(sb.cwiseInverse().asDiagonal() * diamond_jacobian(left));
  const Mat df_right = sb.asDiagonal() * diamond_jacobian(right);
  const Vec ones = Vec::Ones(left.size());

  InterfaceFluxDerivative d;
  d.f_tilde = {df_left, df_right};
  d.j_solid = {-(f * ones.transpose()) - left.sum() * df_left, -left.sum() * df_right};
  d.j_gas = {-right.sum() * df_left, -(f * ones.transpose()) - right.sum() * df_right};
  return d;
}

}  // namespace twophase
