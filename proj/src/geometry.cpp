#include "stablecyl/geometry.hpp"

#include "fem.hpp"
#include "stablecyl/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace stablecyl {

namespace {

// First and second finite-difference derivatives on the full grid. The
// tensor stencils commute, so second[k][l] == second[l][k] exactly.
struct Derivatives {
  int d = 0;
  std::vector<Eigen::VectorXd> first;
  std::vector<std::vector<Eigen::VectorXd>> second;
};

Derivatives derivatives(const CylinderField& u) {
  const auto& grid = u.grid();
  Derivatives D;
  D.d = grid.dim();
  for (int k = 0; k < D.d; ++k) D.first.push_back(axis_derivative(grid, u.values(), k));
  D.second.resize(D.d);
  for (int k = 0; k < D.d; ++k)
    for (int l = 0; l < D.d; ++l)
      D.second[k].push_back(l < k ? D.second[l][k] : axis_derivative(grid, D.first[k], l));
  return D;
}

double y_factor(const CoefficientModel& model, double y) {
  const double theta = model.y_power();
  return theta == 0.0 ? 1.0 : std::pow(y, theta);
}

// Reduced a and a_t/|grad u| at a node.
std::pair<double, double> reduced_coefficients(const CoefficientModel& model, double y, double t) {
  if (model.t_independent()) return {model.a_reduced(y, t), 0.0};
  const double t_eval = std::sqrt(t * t + fem::kGradEps * fem::kGradEps);
  return {model.a_reduced(y, t_eval), model.a_t_reduced(y, t_eval) / t_eval};
}

struct NodeQuantities {
  Eigen::Vector3d grad;   // full gradient, unused tail entries zero
  double speed = 0.0;     // |grad_x u|
  Eigen::Vector3d grad_speed = Eigen::Vector3d::Zero();
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
};

NodeQuantities node_quantities(const Derivatives& D, int i, int n, double threshold) {
  NodeQuantities q;
  q.grad.setZero();
  for (int k = 0; k < D.d; ++k) q.grad[k] = D.first[k][i];
  double s2 = 0.0;
  for (int j = 0; j < n; ++j) s2 += q.grad[j] * q.grad[j];
  q.speed = std::sqrt(s2);
  if (q.speed > threshold && q.speed > 0.0) {
    for (int j = 0; j < n; ++j) q.normal[j] = q.grad[j] / q.speed;
    for (int k = 0; k < D.d; ++k)
      for (int j = 0; j < n; ++j) q.grad_speed[k] += q.normal[j] * D.second[j][k][i];
  }
  return q;
}

// Bracket with reduced coefficients; zero on the sub-threshold set.
double bracket_at(const Derivatives& D, const NodeQuantities& q, int i, int n, double a, double c, double threshold) {
  if (!(q.speed > threshold)) return 0.0;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double h2 = 0.0, proj = 0.0;
    for (int k = 0; k < D.d; ++k) {
      const double h = D.second[j][k][i];
      h2 += h * h;
      proj += q.grad[k] * h;
    }
    sum += a * h2 + c * proj * proj;
  }
  double s2 = 0.0, sproj = 0.0;
  for (int k = 0; k < D.d; ++k) {
    s2 += q.grad_speed[k] * q.grad_speed[k];
    sproj += q.grad[k] * q.grad_speed[k];
  }
  return sum - (a * s2 + c * sproj * sproj);
}

double max_speed(const Derivatives& D, int n) {
  double m = 0.0;
  for (int i = 0; i < D.first[0].size(); ++i) {
    double s2 = 0.0;
    for (int j = 0; j < n; ++j) s2 += D.first[j][i] * D.first[j][i];
    m = std::max(m, std::sqrt(s2));
  }
  return m;
}

}  // namespace

LevelSetGeometry level_set_weights(const CylinderField& u, int y_index, double threshold) {
  const auto& grid = u.grid();
  if (grid.n() != 2) throw NotApplicableError("level_set_weights: level sets are points when n = 1");
  if (y_index < 0 || y_index >= grid.ny()) throw ArgumentError("level_set_weights: slice out of range");
  if (!(threshold > 0.0)) throw ArgumentError("level_set_weights: threshold must be positive");
  const Derivatives D = derivatives(u);
  const int n = 2;

  // Normalized horizontal gradient on the whole grid, for the divergence.
  std::vector<Eigen::VectorXd> unit(n, Eigen::VectorXd::Zero(grid.size()));
  for (int i = 0; i < grid.size(); ++i) {
    const double s = std::hypot(D.first[0][i], D.first[1][i]);
    if (s > 0.0)
      for (int j = 0; j < n; ++j) unit[j][i] = D.first[j][i] / s;
  }
  Eigen::VectorXd div = axis_derivative(grid, unit[0], 0) + axis_derivative(grid, unit[1], 1);

  const int m = grid.slice_size();
  LevelSetGeometry g;
  g.y_index = y_index;
  g.mask.assign(m, 0);
  g.speed = Eigen::VectorXd::Zero(m);
  g.K = Eigen::VectorXd::Zero(m);
  g.tangential_gradient_of_speed = Eigen::VectorXd::Zero(m);
  g.K0 = Eigen::VectorXd::Zero(m);
  g.Ksharp = Eigen::VectorXd::Zero(m);
  for (int s = 0; s < m; ++s) {
    const int i = s * grid.ny() + y_index;
    const NodeQuantities q = node_quantities(D, i, n, threshold);
    g.speed[s] = q.speed;
    if (!(q.speed > threshold)) continue;
    g.mask[s] = 1;
    const double K = std::abs(div[i]);
    const Eigen::Vector2d tangent(-q.normal[1], q.normal[0]);
    const double tang = std::abs(tangent[0] * q.grad_speed[0] + tangent[1] * q.grad_speed[1]);
    double uy2 = 0.0, proj2 = 0.0;
    for (int j = 0; j < n; ++j) {
      uy2 += D.second[j][2][i] * D.second[j][2][i];
      double proj = 0.0;
      for (int k = 0; k < 3; ++k) proj += q.grad[k] * D.second[j][k][i];
      proj2 += proj * proj;
    }
    const double sproj = q.grad.dot(q.grad_speed);
    g.K[s] = K;
    g.tangential_gradient_of_speed[s] = tang;
    g.K0[s] = uy2 - q.grad_speed[2] * q.grad_speed[2] + K * K * q.speed * q.speed + tang * tang;
    g.Ksharp[s] = proj2 - sproj * sproj;
  }
  return g;
}

WeightDecomposition weight_decomposition(const CylinderField& u, const CoefficientModel& model, int y_index,
                                         double threshold) {
  const LevelSetGeometry geo = level_set_weights(u, y_index, threshold);
  const auto& grid = u.grid();
  const Derivatives D = derivatives(u);
  const double y = grid.y_nodes()[y_index];
  const double w = y_factor(model, y);
  WeightDecomposition out;
  out.mask = geo.mask;
  out.bracket = Eigen::VectorXd::Zero(grid.slice_size());
  out.decomposed = Eigen::VectorXd::Zero(grid.slice_size());
  for (int s = 0; s < grid.slice_size(); ++s) {
    if (!geo.mask[s]) continue;
    const int i = s * grid.ny() + y_index;
    const NodeQuantities q = node_quantities(D, i, 2, threshold);
    const auto [a, c] = reduced_coefficients(model, y, q.grad.norm());
    out.bracket[s] = w * bracket_at(D, q, i, 2, a, c, threshold);
    out.decomposed[s] = w * (a * geo.K0[s] + c * geo.Ksharp[s]);
  }
  return out;
}

Eigen::VectorXd bracket_field_reduced(const CylinderField& u, const CoefficientModel& model, double threshold) {
  const auto& grid = u.grid();
  const Derivatives D = derivatives(u);
  const int n = grid.n();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const NodeQuantities q = node_quantities(D, i, n, threshold);
    if (!(q.speed > threshold)) continue;
    const auto [a, c] = reduced_coefficients(model, grid.y_nodes()[grid.iy_of(i)], q.grad.norm());
    out[i] = bracket_at(D, q, i, n, a, c, threshold);
  }
  return out;
}

void to_json(nlohmann::json& j, const PoincareSides& sides) {
  j = nlohmann::json{{"lhs_bulk", sides.lhs_bulk},
                     {"lhs_lateral", sides.lhs_lateral},
                     {"lhs_lateral_exact", sides.lhs_lateral_exact},
                     {"rhs", sides.rhs},
                     {"gap", sides.gap()}};
}

PoincareSides poincare_sides(const CylinderField& u, const CoefficientModel& model,
                             [[maybe_unused]] const ReactionSpec& reaction, const CylinderField& psi, double threshold) {
  const auto& grid = u.grid();
  if (!grid.same_as(psi.grid())) throw ArgumentError("poincare_sides: psi on a different grid");
  const Derivatives D = derivatives(u);
  const int n = grid.n();
  if (threshold < 0.0) threshold = 1e-8 * max_speed(D, n);

  const Eigen::VectorXd w = bulk_weights(grid, model.y_power());
  const VectorField gpsi = gradient(psi);
  const Eigen::VectorXd psi2 = psi.values().cwiseAbs2();
  const Eigen::VectorXd bracket = bracket_field_reduced(u, model, threshold);

  PoincareSides sides;
  for (int i = 0; i < grid.size(); ++i) {
    sides.lhs_bulk += w[i] * bracket[i] * psi2[i];
    const NodeQuantities q = node_quantities(D, i, n, threshold);
    const auto [a, c] = reduced_coefficients(model, grid.y_nodes()[grid.iy_of(i)], q.grad.norm());
    double g2 = 0.0, proj = 0.0;
    for (int k = 0; k < D.d; ++k) {
      g2 += gpsi.components[k][i] * gpsi.components[k][i];
      proj += q.grad[k] * gpsi.components[k][i];
    }
    sides.rhs += w[i] * (a * g2 + c * proj * proj) * q.speed * q.speed;
  }
  const CylinderField weight(psi.grid_ptr(), psi2);
  sides.lhs_lateral = lateral_boundary_term(u, model, weight);
  sides.lhs_lateral_exact = lateral_boundary_term_exact(u, model, weight);
  return sides;
}

double lateral_boundary_term(const CylinderField& u, const CoefficientModel& model, const CylinderField& weight) {
  const auto& grid = u.grid();
  if (!grid.same_as(weight.grid())) throw ArgumentError("lateral_boundary_term: weight on a different grid");
  const Derivatives D = derivatives(u);
  const Eigen::VectorXd wy = y_weights(grid, model.y_power());
  const int n = grid.n();

  // Outward normal +-e_axis on each face; d_nu grad u = sign * grad u_axis.
  auto integrand = [&](int node, int axis, double sign) {
    double dot = 0.0;
    double t2 = 0.0;
    for (int k = 0; k < D.d; ++k) {
      dot += D.first[k][node] * D.second[axis][k][node];
      t2 += D.first[k][node] * D.first[k][node];
    }
    const double a = reduced_coefficients(model, grid.y_nodes()[grid.iy_of(node)], std::sqrt(t2)).first;
    return -a * sign * dot * weight[node];
  };

  double total = 0.0;
  if (n == 1) {
    for (int j = 0; j < grid.ny(); ++j) {
      total += wy[j] * integrand(grid.index(0, 0, j), 0, -1.0);
      total += wy[j] * integrand(grid.index(grid.nx() - 1, 0, j), 0, 1.0);
    }
    return total;
  }
  Eigen::VectorXd wx = Eigen::VectorXd::Zero(grid.nx()), wz = Eigen::VectorXd::Zero(grid.nz());
  for (int i = 0; i + 1 < grid.nx(); ++i) {
    const double h = grid.x_nodes()[i + 1] - grid.x_nodes()[i];
    wx[i] += 0.5 * h;
    wx[i + 1] += 0.5 * h;
  }
  for (int i = 0; i + 1 < grid.nz(); ++i) {
    const double h = grid.z_nodes()[i + 1] - grid.z_nodes()[i];
    wz[i] += 0.5 * h;
    wz[i + 1] += 0.5 * h;
  }
  for (int j = 0; j < grid.ny(); ++j) {
    for (int iz = 0; iz < grid.nz(); ++iz) {
      total += wy[j] * wz[iz] * integrand(grid.index(0, iz, j), 0, -1.0);
      total += wy[j] * wz[iz] * integrand(grid.index(grid.nx() - 1, iz, j), 0, 1.0);
    }
    for (int ix = 0; ix < grid.nx(); ++ix) {
      total += wy[j] * wx[ix] * integrand(grid.index(ix, 0, j), 1, -1.0);
      total += wy[j] * wx[ix] * integrand(grid.index(ix, grid.nz() - 1, j), 1, 1.0);
    }
  }
  return total;
}

double lateral_boundary_term_exact(const CylinderField& u, [[maybe_unused]] const CoefficientModel& model,
                                   const CylinderField& weight) {
  if (!u.grid().same_as(weight.grid())) throw ArgumentError("lateral_boundary_term_exact: weight on a different grid");
  return 0.0;
}

namespace {

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

void check_cutoff_radius(double R) {
  if (!(R > 100.0) || !(std::sqrt(R) + 1.0 < R - 1.0)) throw PreconditionError("log_cutoff: R must exceed 100");
}

}  // namespace

double cutoff_tau(double R, double y) {
  check_cutoff_radius(R);
  const double r = std::sqrt(R);
  if (y <= r || y >= R) return 0.0;
  if (y < r + 1.0) return smoothstep5(y - r);
  if (y > R - 1.0) return smoothstep5(R - y);
  return 1.0;
}

double log_cutoff_value(double R, double y) {
  check_cutoff_radius(R);
  if (y >= R) return 0.0;
  const double r = std::sqrt(R);
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  double total = 0.0;
  const double a0 = std::max(y, r);
  if (a0 < r + 1.0) total += GK::integrate([&](double z) { return smoothstep5(z - r) / z; }, a0, r + 1.0, 10, 1e-14);
  const double a1 = std::max(y, r + 1.0);
  if (a1 < R - 1.0) total += std::log((R - 1.0) / a1);
  const double a2 = std::max(y, R - 1.0);
  if (a2 < R) total += GK::integrate([&](double z) { return smoothstep5(R - z) / z; }, a2, R, 10, 1e-14);
  return total;
}

CylinderField log_cutoff(double R, const GridPtr& grid) {
  check_cutoff_radius(R);
  std::vector<double> profile;
  for (double y : grid->y_nodes()) profile.push_back(log_cutoff_value(R, y));
  Eigen::VectorXd v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v[i] = profile[grid->iy_of(i)];
  return CylinderField(grid, std::move(v));
}

}  // namespace stablecyl
