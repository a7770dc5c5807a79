#pragma once

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"

#include <json.hpp>

#include <vector>

namespace stablecyl {

// Level-curve quantities on one y-slice (rectangles only). Arrays are indexed
// by slice node; entries off the mask are zero.
struct LevelSetGeometry {
  int y_index = 0;
  std::vector<char> mask;                        // |grad_x u| > threshold
  Eigen::VectorXd speed;                         // |grad_x u|
  Eigen::VectorXd K;                             // |curvature| of the level curve
  Eigen::VectorXd tangential_gradient_of_speed;  // |grad_S |grad_x u||
  Eigen::VectorXd K0;
  Eigen::VectorXd Ksharp;
};

LevelSetGeometry level_set_weights(const CylinderField& u, int y_index, double threshold);

// Bulk weight sum_j <B grad u_j, grad u_j> - <B grad|grad_x u|, grad|grad_x u|>
// next to a K0 + (a_t/|grad u|) K#, on one slice.
struct WeightDecomposition {
  std::vector<char> mask;
  Eigen::VectorXd bracket;
  Eigen::VectorXd decomposed;
};

WeightDecomposition weight_decomposition(const CylinderField& u, const CoefficientModel& model, int y_index,
                                         double threshold);

// Nodal bulk weight on the whole grid, with the y^theta factor of power
// models divided out (pair with bulk_weights(grid, theta)). Zero where
// |grad_x u| <= threshold.
Eigen::VectorXd bracket_field_reduced(const CylinderField& u, const CoefficientModel& model, double threshold);

struct PoincareSides {
  double lhs_bulk = 0.0;
  double lhs_lateral = 0.0;        // one-sided stencil evaluation
  double lhs_lateral_exact = 0.0;  // flat lateral faces: identically zero
  double rhs = 0.0;
  double gap() const { return lhs_bulk + lhs_lateral_exact - rhs; }
};

void to_json(nlohmann::json& j, const PoincareSides& sides);

// threshold < 0 selects 1e-8 max|grad_x u|.
PoincareSides poincare_sides(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                             const CylinderField& psi, double threshold = -1.0);

// -\int_{lateral} a (grad u . d_nu grad u) weight, with d_nu grad u from
// one-sided differences.
double lateral_boundary_term(const CylinderField& u, const CoefficientModel& model, const CylinderField& weight);
// The same term from the boundary's second fundamental form; zero on the flat
// faces of intervals and rectangles.
double lateral_boundary_term_exact(const CylinderField& u, const CoefficientModel& model, const CylinderField& weight);

// tau_R: quintic ramps up on [sqrt R, sqrt R + 1] and down on [R - 1, R].
double cutoff_tau(double R, double y);
// psi_R(y) = \int_y^R tau_R(z)/z dz.
double log_cutoff_value(double R, double y);
CylinderField log_cutoff(double R, const GridPtr& grid);

}  // namespace stablecyl
