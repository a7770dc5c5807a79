#pragma once

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace stablecyl {

// Nodal weak residual: entry i is the weak form tested against the Q1 hat
// function of node i. Bulk terms use 2-point Gauss per direction, g and f
// are lumped onto the nodes.
Eigen::VectorXd nodal_residual(const CylinderField& u, const CoefficientModel& model,
                               const ReactionSpec& reaction);

// \int a grad u . grad phi + \int g phi - \int_bottom f(u) phi, with phi
// interpolated in Q1. phi must vanish on the top slice.
double residual_weak(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                     const CylinderField& phi);

struct SolveReport {
  CylinderField u;
  int newton_iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  double tol = 0.0;
};

void to_json(nlohmann::json& j, const SolveReport& report);

// Damped Newton with Armijo backtracking on ||R||^2. With a Dirichlet top the
// top slice is held at the values of `init`.
SolveReport solve_newton(const CoefficientModel& model, const ReactionSpec& reaction, const GridPtr& grid,
                         const CylinderField& init, double tol, int max_iter,
                         TopCondition top = TopCondition::Neumann);

enum class CatalogName { DecayCos, GrowCos, LinearY, ExpDecay, OneDimFamily };
std::string to_string(CatalogName name);
CatalogName catalog_name_from_string(const std::string& name);

struct CatalogParams {
  double c = 0.0;  // OneDimFamily level at y = 0
  std::optional<CoefficientModel> model;
  std::optional<ReactionSpec> reaction;
};

// Coefficient and reaction under which the named catalog field is a solution.
struct CatalogProblem {
  CoefficientModel model;
  ReactionSpec reaction;
};
CatalogProblem catalog_problem(CatalogName name, const CatalogParams& params = {});

// DecayCos e^{-y}cos x, GrowCos e^{y}cos x, LinearY y, ExpDecay e^{-y},
// OneDimFamily u(y) = c - f(c) \int_0^y dz / a(z) (for t-dependent a the flux
// a(z,|u'|)|u'| = |f(c)| is inverted pointwise).
CylinderField catalog_solution(CatalogName name, const CatalogParams& params, const GridPtr& grid);

// max over y-slices of (max - min over Omega).
double check_y_dependence(const CylinderField& u);

struct ExtremumReport {
  double c = 0.0;              // global discrete minimum
  double bottom_min = 0.0;
  double f_c = 0.0;
  bool min_on_bottom = false;  // |bottom_min - c| <= 1e-8
  bool f_c_nonpositive = false;
  bool holds() const { return min_on_bottom && f_c_nonpositive; }
};

ExtremumReport extremum_details(const CylinderField& u, const ReactionSpec& reaction);
bool extremum_sign_check(const CylinderField& u, const ReactionSpec& reaction);

// Sampled check of a_t <= 0, g == 0 and the growth condition
// R^{-2} \int_R^{2R} a(y,0) dy -> 0 (evaluated at R = 10 and R = 100).
bool minimum_principle_hypotheses(const CoefficientModel& model, const ReactionSpec& reaction);

}  // namespace stablecyl
