#pragma once

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"

#include <Eigen/Sparse>
#include <json.hpp>

#include <string>
#include <vector>

namespace stablecyl {

// Discrete second variation on nodal test functions that vanish on the top
// slice (and, optionally, above a cap height). Matrices are indexed by the
// free nodes listed in `dofs`.
struct StabilityForm {
  GridPtr grid;
  std::vector<int> dofs;                 // grid node of each test-space index
  Eigen::SparseMatrix<double> energy;    // B-stiffness + g_u mass - f'(u) bottom mass
  Eigen::VectorXd mass;                  // lumped: a-weighted bulk + bottom trace (diagonal)
  double shift_hint = 0.0;               // lower bound used for shift-invert

  Eigen::SparseMatrix<double> mass_matrix() const;
  // Nodal field from a test-space vector (zero on excluded nodes).
  CylinderField embed(const Eigen::VectorXd& phi) const;
  // Test-space vector from a nodal field.
  Eigen::VectorXd restrict(const CylinderField& phi) const;
};

// cap_height < 0 keeps every node below the top slice.
StabilityForm assemble_I(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                         double cap_height = -1.0);

struct EigenPair {
  double value = 0.0;
  CylinderField field;      // mass-normalized
  Eigen::VectorXd vector;   // test-space coefficients
  double residual = 0.0;    // ||A phi - mu M phi|| / max(||A phi||, ||M phi||)
};

// k smallest generalized eigenpairs by shift-invert Lanczos.
std::vector<EigenPair> min_rayleigh(const StabilityForm& form, int k);
// Same pairs from a dense generalized eigensolve (small forms only).
std::vector<EigenPair> min_rayleigh_dense(const StabilityForm& form, int k);

enum class Classification { Stable, Unstable, Marginal };
std::string to_string(Classification c);

struct StabilityReport {
  double mu1 = 0.0;
  CylinderField ground_state;
  Classification classification = Classification::Marginal;
  double tol = 0.0;
  double eigen_residual = 0.0;
};

void to_json(nlohmann::json& j, const StabilityReport& report);

// 1e-6 times a Gershgorin bound on the spectral radius of M^{-1} A.
double default_stability_tol(const StabilityForm& form);

Classification classify_mu(double mu1, double tol);
StabilityReport classify(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                         double tol);
// tol <= 0 selects default_stability_tol.
StabilityReport classify(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction);

enum class SignClass { StrictlyPositive, StrictlyNegative, IdenticallyZero, Mixed };
std::string to_string(SignClass c);

// Nodal signs over the test space (top slice excluded).
SignClass sign_trichotomy(const CylinderField& ground_state, double tol);

// -\int (a_t/|grad u|)(grad u . grad phi)^2 with the regularized |grad u|.
double form_J(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi);
// \int <B grad phi, grad phi> and \int a |grad phi|^2 on the same quadrature.
double form_B_energy(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi);
double form_a_energy(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi);

// min over bottom nodes of (f(u) + f'(u)(c-u))(c-u) - f(c)(c-u).
double convexity_gap(const Eigen::VectorXd& u_bottom, const ReactionSpec& reaction, double c);

}  // namespace stablecyl
