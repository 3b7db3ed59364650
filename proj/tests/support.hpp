#pragma once

#include <random>

#include "twophase/model.hpp"
#include "twophase/mesh.hpp"

namespace support {

using twophase::Mat;
using twophase::Vec;

inline Mat paper_kappa() {
  Mat k(3, 3);
  k << 0.0, 0.2, 1.0,
       0.2, 0.0, 0.1,
       1.0, 0.1, 0.0;
  return k;
}

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline twophase::ModelParams paper_params(const Vec& beta) {
  return twophase::ModelParams::from_beta(paper_kappa(), paper_kappa(), beta);
}

inline twophase::ModelParams equilibrium_params() { return paper_params(vec({1.0 / 6.0, 4.0, 4.0})); }

// Dirichlet(1,...,1) sample kept away from zero, so logs stay tame.
inline Vec random_composition(std::mt19937& rng, int n, double floor = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  Vec c(n);
  for (int i = 0; i < n; ++i) c[i] = e(rng) + floor;
  return c / c.sum();
}

inline twophase::CellField random_field(std::mt19937& rng, int cells, int n) {
  twophase::CellField c;
  for (int k = 0; k < cells; ++k) c.push_back(random_composition(rng, n));
  return c;
}

inline Mat random_symmetric_kappa(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Mat k = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) k(i, j) = k(j, i) = u(rng);
  return k;
}

}  // namespace support
