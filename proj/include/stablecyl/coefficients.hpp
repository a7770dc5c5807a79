#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stablecyl {

enum class CoefficientKind {
  PowerWeight,          // y^theta
  PowerWeightPLaplace,  // y^theta (1+t^2)^{p/2}
  MeanCurvatureWeight,  // y^theta / sqrt(1+t^2)
  ConstantOne,          // 1
  ExpY,                 // e^y
  Custom,
};

std::string to_string(CoefficientKind kind);
CoefficientKind coefficient_kind_from_string(const std::string& name);

using ScalarField2 = std::function<double(double y, double t)>;

// The diffusion coefficient a(y,t) of the cylinder problem together with its
// derivative in the gradient-magnitude variable t.
class CoefficientModel {
 public:
  static CoefficientModel power_weight(double theta);
  static CoefficientModel power_weight_p_laplace(double theta, double p);
  static CoefficientModel mean_curvature_weight(double theta);
  static CoefficientModel constant_one();
  static CoefficientModel exp_y();
  // a_t may be left empty; it is then approximated by centered differences.
  static CoefficientModel custom(ScalarField2 a, ScalarField2 a_t = {}, std::string label = "custom");

  CoefficientKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double p() const { return p_; }
  const std::string& label() const { return label_; }

  // Exponent of the separable y^theta factor (0 for models without one).
  double y_power() const;
  // True when a does not depend on t (so B = a * Identity).
  bool t_independent() const;

  // a(y,t) and a_t(y,t) with the y^theta factor divided out. Both accept
  // y = 0 for the power families; used by weighted quadratures.
  double a_reduced(double y, double t) const;
  double a_t_reduced(double y, double t) const;

 private:
  CoefficientModel() = default;

  CoefficientKind kind_ = CoefficientKind::ConstantOne;
  double theta_ = 0.0;
  double p_ = 2.0;
  ScalarField2 custom_a_;
  ScalarField2 custom_a_t_;
  std::string label_;

  friend double eval_a(const CoefficientModel&, double, double);
  friend double eval_a_t(const CoefficientModel&, double, double);
};

// a(y,t); throws DomainError for y <= 0 or t < 0 and RangeError on overflow.
double eval_a(const CoefficientModel& model, double y, double t);
// a_t(y,t); at t = 0 the analytic limit for built-in kinds, a one-sided
// difference with step 1e-6 for custom models.
double eval_a_t(const CoefficientModel& model, double y, double t);

struct StructuralReport {
  bool ellipticity_ok = true;
  double derivative_bound_C = 0.0;  // observed sup of t|a_t|/a
  bool limit_zero_ok = true;
  std::optional<std::pair<double, double>> witness;  // (y, t) of the first failure
};

std::vector<double> default_y_samples();
std::vector<double> default_t_samples();

StructuralReport check_structural(const CoefficientModel& model,
                                  const std::vector<double>& y_samples,
                                  const std::vector<double>& t_samples);
StructuralReport check_structural(const CoefficientModel& model);

struct MatrixB {
  int dim = 0;
  Eigen::MatrixXd entries;
};

// B_ij = a(y,|eta|) delta_ij + a_t(y,|eta|)/|eta| eta_i eta_j, the second term
// dropped at eta = 0.
MatrixB matrix_B(const CoefficientModel& model, double y, const Eigen::VectorXd& eta);

// (a + |eta| a_t, a): the eigenvalue along eta (multiplicity 1) and the one on
// the orthogonal complement (multiplicity n). Throws ArgumentError at eta = 0.
std::pair<double, double> eigvals_B_closed_form(const CoefficientModel& model, double y,
                                                const Eigen::VectorXd& eta);

}  // namespace stablecyl
