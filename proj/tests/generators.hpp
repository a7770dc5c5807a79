#pragma once

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int integer(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline stablecyl::CoefficientModel model(Rng& rng) {
  using stablecyl::CoefficientModel;
  switch (integer(rng, 0, 4)) {
    case 0: return CoefficientModel::power_weight(uniform(rng, -0.9, 0.9));
    case 1: return CoefficientModel::power_weight_p_laplace(uniform(rng, -0.9, 0.9), uniform(rng, 1.1, 4.0));
    case 2: return CoefficientModel::mean_curvature_weight(uniform(rng, -0.9, 0.9));
    case 3: return CoefficientModel::constant_one();
    default: return CoefficientModel::exp_y();
  }
}

inline Eigen::VectorXd vector(Rng& rng, int dim, double lo_norm, double hi_norm) {
  Eigen::VectorXd v(dim);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < dim; ++i) v[i] = n(rng);
  return v * (std::exp(uniform(rng, std::log(lo_norm), std::log(hi_norm))) / v.norm());
}

// Smooth field: a few random tensor cosines times a random y profile.
inline stablecyl::CylinderField smooth_field(Rng& rng, const stablecyl::GridPtr& grid, double amplitude = 1.0) {
  double a[3][3], rate = uniform(rng, 0.2, 1.5), shift = uniform(rng, -1.0, 1.0);
  for (auto& row : a)
    for (double& v : row) v = uniform(rng, -1.0, 1.0);
  const auto& d = grid->domain();
  return stablecyl::sample(grid, [&](const stablecyl::Point& p) {
    double v = shift;
    for (int m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k) {
        if (d.n() == 1 && k > 0) continue;
        const double cz = d.n() == 1 ? 1.0 : std::cos(k * std::numbers::pi * (p.z - d.z_min) / d.length_z());
        v += a[m][k] * std::cos(m * std::numbers::pi * (p.x - d.x_min) / d.length_x()) * cz * std::exp(-rate * p.y);
      }
    return amplitude * v;
  });
}

}  // namespace gen
