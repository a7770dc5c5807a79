#pragma once

#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"

#include <json.hpp>

#include <array>
#include <memory>
#include <vector>

namespace stablecyl {

// Neumann eigenpairs of -Laplace on an interval or rectangle, ordered by
// eigenvalue with ties broken lexicographically in the mode indices.
// Eigenfields are evaluated on a uniform Omega grid of `nodes_per_side`
// nodes per direction.
class SpectralBasis {
 public:
  SpectralBasis(DomainSpec domain, int K, int nodes_per_side);

  const DomainSpec& domain() const { return domain_; }
  int K() const { return static_cast<int>(lambdas_.size()); }
  int nodes_per_side() const { return nodes_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double lambda(int k) const { return lambdas_[k]; }
  // Mode indices (m_x, m_z) of eigenfunction k (m_z = 0 on intervals).
  std::array<int, 2> mode(int k) const { return modes_[k]; }

  double eval(int k, double x, double z = 0.0) const;
  double sup_norm(int k) const;

  // Omega grid of the basis: nodes and trapezoid weights, x-major like the
  // cylinder slice ordering.
  int omega_size() const { return nodes_ * (domain_.n() == 1 ? 1 : nodes_); }
  Eigen::VectorXd omega_weights() const;
  Eigen::VectorXd eigenfield(int k) const;
  // Eigenfield sampled on the Omega slice of a cylinder grid.
  Eigen::VectorXd eigenfield_on(int k, const CylinderGrid& grid) const;

 private:
  DomainSpec domain_;
  int nodes_;
  std::vector<double> lambdas_;
  std::vector<std::array<int, 2>> modes_;
  std::vector<double> xs_, zs_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

BasisPtr neumann_basis(const DomainSpec& domain, int K, int nodes_per_side = 129);

struct SpectralFunction {
  BasisPtr basis;
  Eigen::VectorXd coeffs;

  double h_half_seminorm_sq() const;  // sum lambda_k^{1/2} w_k^2
  double nonconstant_energy() const;  // sum_{k>=1} w_k^2
  Eigen::VectorXd on_omega() const;   // values on the basis Omega grid
};

void to_json(nlohmann::json& j, const SpectralFunction& w);
SpectralFunction spectral_function_from_json(const nlohmann::json& j);

// L^2 projection onto the basis using the basis Omega quadrature.
SpectralFunction project(const BasisPtr& basis, const Eigen::VectorXd& omega_values);

SpectralFunction apply_fractional(const SpectralBasis& basis, double s, const SpectralFunction& w);

struct SemilinearReport {
  SpectralFunction v;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

// Galerkin-Newton for lambda_k^s v_k = <f(v), phi_k>. Throws SolverError when
// the iteration stalls or max_iter is exhausted.
SemilinearReport solve_semilinear(const BasisPtr& basis, double s, const ReactionSpec& reaction,
                                  const SpectralFunction& init, double tol, int max_iter);

// u(x,y) = sum v_k phi_k(x) e^{-sqrt(lambda_k) y}.
CylinderField extend_harmonic(const SpectralBasis& basis, const SpectralFunction& v, const GridPtr& grid);
// Experimental: profile 2^{1-s}/Gamma(s) t^s K_s(t), t = sqrt(lambda_k) y,
// solving the y^{1-2s}-weighted extension. Equals extend_harmonic at s = 1/2.
CylinderField extend_fractional(const SpectralBasis& basis, const SpectralFunction& v, double s,
                                const GridPtr& grid);

struct GrowthReport {
  int K_beta = 0;
  double C1 = 0.0;
  double C2 = 0.0;
};

GrowthReport eig_growth_check(const SpectralBasis& basis, double beta);

// Max weak residual of the extended spectral solution against a battery of
// test fields vanishing at the top.
double extension_equivalence(const BasisPtr& basis, const ReactionSpec& reaction, const GridPtr& grid, double tol,
                             const SpectralFunction* init = nullptr);

}  // namespace stablecyl
