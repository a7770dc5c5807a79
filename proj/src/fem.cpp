#include "fem.hpp"

#include <vector>

namespace stablecyl::fem {

Assembly assemble(const CylinderGrid& grid, const Eigen::VectorXd& u, const CoefficientModel& model,
                  const ReactionSpec& reaction, Request request) {
  const int size = grid.size();
  const int d = grid.dim();
  const bool smooth = !model.t_independent();
  Assembly out;
  if (request.residual) out.residual = Eigen::VectorXd::Zero(size);
  if (request.a_mass) out.a_mass = Eigen::VectorXd::Zero(size);
  std::vector<Eigen::Triplet<double>> triplets;

  Eigen::MatrixXd B(d, d);
  for_each_gauss_point(grid, u, [&](const GaussPoint& gp) {
    const double t = gp.grad_u.norm();
    const double t_eval = smooth ? std::sqrt(t * t + kGradEps * kGradEps) : t;
    const double a = eval_a(model, gp.y, t_eval);
    const int corners = static_cast<int>(gp.nodes.size());
    if (request.residual) {
      const Eigen::VectorXd flux = a * gp.grad_u;
      for (int c = 0; c < corners; ++c) out.residual[gp.nodes[c]] += gp.weight * gp.shape_grad.row(c).dot(flux);
    }
    if (request.a_mass) {
      for (int c = 0; c < corners; ++c) out.a_mass[gp.nodes[c]] += gp.weight * a * gp.values[c];
    }
    if (request.jacobian) {
      B.setIdentity();
      B *= a;
      if (smooth) B += (eval_a_t(model, gp.y, t_eval) / t_eval) * gp.grad_u * gp.grad_u.transpose();
      const Eigen::MatrixXd GB = gp.shape_grad * B;
      for (int i = 0; i < corners; ++i)
        for (int j = 0; j < corners; ++j)
          triplets.emplace_back(gp.nodes[i], gp.nodes[j], gp.weight * GB.row(i).dot(gp.shape_grad.row(j)));
    }
  });

  // Lumped bulk reaction and bottom boundary terms.
  const bool bulk = !reaction.g_zero;
  if (bulk) {
    const Eigen::VectorXd w = bulk_weights(grid);
    for (int i = 0; i < size; ++i) {
      const double y = grid.y_nodes()[grid.iy_of(i)];
      if (request.residual) out.residual[i] += w[i] * reaction.g(y, u[i]);
      if (request.jacobian) triplets.emplace_back(i, i, w[i] * reaction.g_u(y, u[i]));
    }
  }
  const Eigen::VectorXd wb = slice_weights(grid);
  for (int ix = 0; ix < grid.nx(); ++ix) {
    for (int iz = 0; iz < grid.nz(); ++iz) {
      const int node = grid.index(ix, iz, 0);
      const double w = wb[grid.slice_index(ix, iz)];
      if (request.residual) out.residual[node] -= w * reaction.f(u[node]);
      if (request.jacobian) triplets.emplace_back(node, node, -w * reaction.f_prime(u[node]));
    }
  }

  if (request.jacobian) {
    out.jacobian.resize(size, size);
    out.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  }
  return out;
}

}  // namespace stablecyl::fem
