#pragma once

// Q1 finite elements on the tensor grid: shared by the Newton solver and the
// stability form.

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"

#include <Eigen/Sparse>

namespace stablecyl::fem {

constexpr double kGradEps = 1e-10;

struct Assembly {
  Eigen::VectorXd residual;               // R_i = weak residual against the hat function N_i
  Eigen::SparseMatrix<double> jacobian;   // dR_i/du_j
  Eigen::VectorXd a_mass;                 // \int a(y,|grad u|) N_i
};

struct Request {
  bool residual = true;
  bool jacobian = true;
  bool a_mass = false;
};

Assembly assemble(const CylinderGrid& grid, const Eigen::VectorXd& u, const CoefficientModel& model,
                  const ReactionSpec& reaction, Request request);

// Visits every Gauss point: fn(y, grad u at the point, weight, local node ids,
// local shape gradients). Shape gradients are stored row-wise (node, axis).
struct GaussPoint {
  double y = 0.0;
  double weight = 0.0;
  Eigen::VectorXd grad_u;
  Eigen::VectorXd values;      // shape values at the point
  Eigen::MatrixXd shape_grad;  // (2^d) x d
  std::vector<int> nodes;
};

template <class Fn>
void for_each_gauss_point(const CylinderGrid& grid, const Eigen::VectorXd& u, Fn&& fn);

}  // namespace stablecyl::fem

#include "fem_impl.hpp"
