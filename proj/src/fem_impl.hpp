#pragma once

#include <cmath>

namespace stablecyl::fem {

template <class Fn>
void for_each_gauss_point(const CylinderGrid& grid, const Eigen::VectorXd& u, Fn&& fn) {
  const int d = grid.dim();
  const int corners = 1 << d;
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double g1 = 0.5 + 0.5 / std::sqrt(3.0);

  std::vector<int> counts(d), strides(d);
  for (int k = 0; k < d; ++k) {
    counts[k] = grid.axis_count(k) - 1;
    strides[k] = grid.stride(k);
  }

  GaussPoint gp;
  gp.grad_u.resize(d);
  gp.values.resize(corners);
  gp.shape_grad.resize(corners, d);
  gp.nodes.resize(corners);

  std::vector<int> e(d, 0);
  std::vector<double> h(d), xi(d);
  while (true) {
    int base = 0;
    double volume = 1.0;
    for (int k = 0; k < d; ++k) {
      const auto& nodes = grid.axis_nodes(k);
      h[k] = nodes[e[k] + 1] - nodes[e[k]];
      base += e[k] * strides[k];
      volume *= h[k];
    }
    for (int c = 0; c < corners; ++c) {
      int node = base;
      for (int k = 0; k < d; ++k)
        if (c >> k & 1) node += strides[k];
      gp.nodes[c] = node;
    }
    const double y0 = grid.y_nodes()[e[d - 1]];
    for (int q = 0; q < corners; ++q) {
      for (int k = 0; k < d; ++k) xi[k] = (q >> k & 1) ? g1 : g0;
      for (int c = 0; c < corners; ++c) {
        double value = 1.0;
        for (int k = 0; k < d; ++k) value *= (c >> k & 1) ? xi[k] : 1.0 - xi[k];
        gp.values[c] = value;
        for (int k = 0; k < d; ++k) {
          double g = ((c >> k & 1) ? 1.0 : -1.0) / h[k];
          for (int j = 0; j < d; ++j)
            if (j != k) g *= (c >> j & 1) ? xi[j] : 1.0 - xi[j];
          gp.shape_grad(c, k) = g;
        }
      }
      gp.grad_u.setZero();
      for (int c = 0; c < corners; ++c) gp.grad_u += u[gp.nodes[c]] * gp.shape_grad.row(c).transpose();
      gp.y = y0 + xi[d - 1] * h[d - 1];
      gp.weight = volume / corners;
      fn(static_cast<const GaussPoint&>(gp));
    }
    int k = 0;
    while (k < d && ++e[k] == counts[k]) e[k++] = 0;
    if (k == d) break;
  }
}

}  // namespace stablecyl::fem
