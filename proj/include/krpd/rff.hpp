#pragma once

#include "krpd/common.hpp"
#include "krpd/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace krpd {

/// Random Fourier feature map for the RBF kernel exp(-gamma |x - y|^2).
///
/// z(x)_i = sqrt(2/D) cos(w_i . x + b_i) with w_i ~ N(0, 2 gamma I) and
/// b_i ~ U[0, 2 pi), so E[z(x) . z(y)] = k(x, y).
struct RffMap {
  Matrix frequencies;  ///< D x d
  Vector phases;       ///< D
  double gamma = 1.0;
  std::uint64_t seed = 0;

  Eigen::Index n_features() const noexcept { return frequencies.rows(); }
  Eigen::Index n_dims() const noexcept { return frequencies.cols(); }
};

inline RffMap fit_rff(double gamma, Eigen::Index dim, Eigen::Index n_features, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("fit_rff: gamma must be positive");
  if (dim < 1 || n_features < 1) throw std::invalid_argument("fit_rff: dim and n_features must be >= 1");
  Rng rng(derive_seed(seed, tag("rff")));
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 * gamma));
  RffMap map;
  map.gamma = gamma;
  map.seed = seed;
  map.frequencies.resize(n_features, dim);
  map.phases.resize(n_features);
  for (Eigen::Index i = 0; i < n_features; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) map.frequencies(i, j) = normal(rng);
  }
  for (Eigen::Index i = 0; i < n_features; ++i) map.phases(i) = 2.0 * std::numbers::pi * rng.uniform();
  return map;
}

/// Q x D feature matrix.
inline RowMatrix rff_transform(const RffMap& map, const RowMatrix& points) {
  require_dims(map.n_dims(), points.cols(), "rff_transform");
  const double scale = std::sqrt(2.0 / static_cast<double>(map.n_features()));
  RowMatrix z = points * map.frequencies.transpose();
  z.rowwise() += map.phases.transpose();
  return (scale * z.array().cos()).matrix();
}

}  // namespace krpd
