#include "stablecyl/coefficients.hpp"

#include "stablecyl/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stablecyl {

namespace {

constexpr double kCustomStep = 1e-6;

void check_point(double y, double t) {
  if (!(y > 0.0) || !(t >= 0.0)) {
    std::ostringstream os;
    os << "coefficient evaluated outside y > 0, t >= 0 (y=" << y << ", t=" << t << ")";
    throw DomainError(os.str(), std::make_pair(y, t));
  }
}

double finite_or_throw(double value, double y, double t) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "coefficient overflow at y=" << y << ", t=" << t;
    throw RangeError(os.str());
  }
  return value;
}

}  // namespace

std::string to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::PowerWeight: return "PowerWeight";
    case CoefficientKind::PowerWeightPLaplace: return "PowerWeightPLaplace";
    case CoefficientKind::MeanCurvatureWeight: return "MeanCurvatureWeight";
    case CoefficientKind::ConstantOne: return "ConstantOne";
    case CoefficientKind::ExpY: return "ExpY";
    case CoefficientKind::Custom: return "Custom";
  }
  return "?";
}

CoefficientKind coefficient_kind_from_string(const std::string& name) {
  for (auto k : {CoefficientKind::PowerWeight, CoefficientKind::PowerWeightPLaplace,
                 CoefficientKind::MeanCurvatureWeight, CoefficientKind::ConstantOne,
                 CoefficientKind::ExpY, CoefficientKind::Custom}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown coefficient kind '" + name + "'");
}

CoefficientModel CoefficientModel::power_weight(double theta) {
  if (!(theta > -1.0 && theta < 1.0)) throw ArgumentError("PowerWeight needs theta in (-1,1)");
  CoefficientModel m;
  m.kind_ = CoefficientKind::PowerWeight;
  m.theta_ = theta;
  m.label_ = to_string(m.kind_);
  return m;
}

CoefficientModel CoefficientModel::power_weight_p_laplace(double theta, double p) {
  if (!(theta > -1.0 && theta < 1.0)) throw ArgumentError("PowerWeightPLaplace needs theta in (-1,1)");
  if (!(p > 1.0)) throw ArgumentError("PowerWeightPLaplace needs p > 1");
  CoefficientModel m;
  m.kind_ = CoefficientKind::PowerWeightPLaplace;
  m.theta_ = theta;
  m.p_ = p;
  m.label_ = to_string(m.kind_);
  return m;
}

CoefficientModel CoefficientModel::mean_curvature_weight(double theta) {
  if (!(theta > -1.0 && theta < 1.0)) throw ArgumentError("MeanCurvatureWeight needs theta in (-1,1)");
  CoefficientModel m;
  m.kind_ = CoefficientKind::MeanCurvatureWeight;
  m.theta_ = theta;
  m.label_ = to_string(m.kind_);
  return m;
}

CoefficientModel CoefficientModel::constant_one() {
  CoefficientModel m;
  m.kind_ = CoefficientKind::ConstantOne;
  m.label_ = to_string(m.kind_);
  return m;
}

CoefficientModel CoefficientModel::exp_y() {
  CoefficientModel m;
  m.kind_ = CoefficientKind::ExpY;
  m.label_ = to_string(m.kind_);
  return m;
}

CoefficientModel CoefficientModel::custom(ScalarField2 a, ScalarField2 a_t, std::string label) {
  if (!a) throw ArgumentError("custom coefficient needs a callable a(y,t)");
  CoefficientModel m;
  m.kind_ = CoefficientKind::Custom;
  m.custom_a_ = std::move(a);
  m.custom_a_t_ = std::move(a_t);
  m.label_ = std::move(label);
  return m;
}

double CoefficientModel::y_power() const {
  switch (kind_) {
    case CoefficientKind::PowerWeight:
    case CoefficientKind::PowerWeightPLaplace:
    case CoefficientKind::MeanCurvatureWeight:
      return theta_;
    default:
      return 0.0;
  }
}

bool CoefficientModel::t_independent() const {
  switch (kind_) {
    case CoefficientKind::PowerWeight:
    case CoefficientKind::ConstantOne:
    case CoefficientKind::ExpY:
      return true;
    default:
      return false;
  }
}

double CoefficientModel::a_reduced(double y, double t) const {
  switch (kind_) {
    case CoefficientKind::PowerWeight: return 1.0;
    case CoefficientKind::PowerWeightPLaplace: return finite_or_throw(std::pow(1.0 + t * t, 0.5 * p_), y, t);
    case CoefficientKind::MeanCurvatureWeight: return 1.0 / std::sqrt(1.0 + t * t);
    case CoefficientKind::ConstantOne: return 1.0;
    case CoefficientKind::ExpY: return finite_or_throw(std::exp(y), y, t);
    case CoefficientKind::Custom: return finite_or_throw(custom_a_(y, t), y, t);
  }
  return 1.0;
}

double CoefficientModel::a_t_reduced(double y, double t) const {
  switch (kind_) {
    case CoefficientKind::PowerWeight:
    case CoefficientKind::ConstantOne:
    case CoefficientKind::ExpY:
      return 0.0;
    case CoefficientKind::PowerWeightPLaplace:
      return finite_or_throw(p_ * t * std::pow(1.0 + t * t, 0.5 * p_ - 1.0), y, t);
    case CoefficientKind::MeanCurvatureWeight:
      return -t / std::pow(1.0 + t * t, 1.5);
    case CoefficientKind::Custom: {
      if (t == 0.0) return (custom_a_(y, kCustomStep) - custom_a_(y, 0.0)) / kCustomStep;
      if (custom_a_t_) return finite_or_throw(custom_a_t_(y, t), y, t);
      const double step = std::min(kCustomStep, 0.5 * t);
      return (custom_a_(y, t + step) - custom_a_(y, t - step)) / (2.0 * step);
    }
  }
  return 0.0;
}

double eval_a(const CoefficientModel& model, double y, double t) {
  check_point(y, t);
  const double weight = model.y_power() == 0.0 ? 1.0 : std::pow(y, model.y_power());
  return finite_or_throw(weight * model.a_reduced(y, t), y, t);
}

double eval_a_t(const CoefficientModel& model, double y, double t) {
  check_point(y, t);
  const double weight = model.y_power() == 0.0 ? 1.0 : std::pow(y, model.y_power());
  return finite_or_throw(weight * model.a_t_reduced(y, t), y, t);
}

std::vector<double> default_y_samples() {
  std::vector<double> ys;
  for (int i = 0; i < 17; ++i) ys.push_back(std::pow(10.0, -2.0 + 4.0 * i / 16.0));
  return ys;
}

std::vector<double> default_t_samples() {
  std::vector<double> ts{0.0};
  for (int i = 0; i < 17; ++i) ts.push_back(std::pow(10.0, -2.0 + 4.0 * i / 16.0));
  return ts;
}

StructuralReport check_structural(const CoefficientModel& model, const std::vector<double>& y_samples,
                                  const std::vector<double>& t_samples) {
  if (y_samples.empty() || t_samples.empty()) throw ArgumentError("check_structural needs nonempty samples");
  StructuralReport report;
  for (double y : y_samples) {
    for (double t : t_samples) {
      double a = 0.0;
      double a_t = 0.0;
      try {
        a = eval_a(model, y, t);
        a_t = eval_a_t(model, y, t);
      } catch (const DomainError& e) {
        throw DomainError(e.what(), std::make_pair(y, t));
      }
      if (!(a > 0.0) || !(a + t * a_t > 0.0)) {
        if (report.ellipticity_ok) report.witness = std::make_pair(y, t);
        report.ellipticity_ok = false;
      }
      if (a > 0.0) report.derivative_bound_C = std::max(report.derivative_bound_C, t * std::abs(a_t) / a);
    }
    double last = std::numeric_limits<double>::infinity();
    for (int k = 3; k <= 8; ++k) {
      const double t = std::pow(10.0, -k);
      last = std::abs(t * eval_a_t(model, y, t));
    }
    if (!(last < 1e-6)) report.limit_zero_ok = false;
  }
  return report;
}

StructuralReport check_structural(const CoefficientModel& model) {
  return check_structural(model, default_y_samples(), default_t_samples());
}

MatrixB matrix_B(const CoefficientModel& model, double y, const Eigen::VectorXd& eta) {
  const double t = eta.norm();
  const double a = eval_a(model, y, t);
  MatrixB B;
  B.dim = static_cast<int>(eta.size());
  B.entries = a * Eigen::MatrixXd::Identity(B.dim, B.dim);
  if (t > 0.0) {
    const double c = eval_a_t(model, y, t) / t;
    for (int i = 0; i < B.dim; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double v = c * eta[i] * eta[j];
        B.entries(i, j) += v;
        if (i != j) B.entries(j, i) += v;
      }
    }
  }
  return B;
}

std::pair<double, double> eigvals_B_closed_form(const CoefficientModel& model, double y,
                                                const Eigen::VectorXd& eta) {
  const double t = eta.norm();
  if (t == 0.0) throw ArgumentError("eigvals_B_closed_form: degenerate eta = 0");
  const double a = eval_a(model, y, t);
  return {a + t * eval_a_t(model, y, t), a};
}

}  // namespace stablecyl
