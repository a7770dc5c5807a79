#pragma once

#include "stablecyl/spectral.hpp"

#include <json.hpp>

#include <functional>
#include <vector>

namespace stablecyl {

// Quadrature for pv \int (v(x) - v(y)) |x - y|^{-1-2s} dy with v piecewise
// linear on a sorted mesh and zero outside it. At a target node the mesh must
// be locally uniform; the two adjacent cells use the quadratic Taylor
// correction and the exterior of the mesh is integrated analytically. Every
// row has the form  (L v)_i = sum_j c_ij (v_i - v_j) + tail_i v_i  with
// c_ij >= 0, tail_i > 0.
class Fractional1DOperator {
 public:
  Fractional1DOperator(double s, std::vector<double> nodes);

  // Uniform mesh of spacing h on [-M, M].
  static Fractional1DOperator uniform(double s, double M, double h);
  // Uniform spacing h on [-inner, inner], then cells growing by `ratio` up to
  // [-M, M].
  static Fractional1DOperator graded(double s, double inner, double h, double M, double ratio = 1.1);

  double s() const { return s_; }
  const std::vector<double>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double M_left() const { return nodes_.front(); }
  double M_right() const { return nodes_.back(); }

  // Index of the node at x (tolerance 1e-9 h); -1 if none.
  int find_node(double x) const;
  // True when node i has equal neighbouring spacings and is not an end node.
  bool is_target(int i) const;

  // Dense row: weights w with (L v)_i = w . v. Throws DomainError for
  // non-target nodes.
  Eigen::VectorXd row(int i) const;
  Eigen::MatrixXd rows(const std::vector<int>& targets) const;

 private:
  double s_;
  std::vector<double> nodes_;
};

double apply_integral_fraclap(const Fractional1DOperator& op, const Eigen::VectorXd& v, double x);

// Normalizing constant C_{1,s} = s 4^s Gamma(1/2+s) / (sqrt(pi) Gamma(1-s)).
double fractional_constant(double s);

enum class Side { FromLeftInterval, FromRightInterval };
std::string to_string(Side side);

// Richardson limit of (v(x + t nu) - v(x)) / t^s, nu the inward direction of
// the interval, over t = h 2^{-j}, j = 0..4.
double fractional_normal_derivative(const std::function<double(double)>& v, double s, double x, Side side,
                                    double h);
// Same for nodal data, using the local cubic interpolant.
double fractional_normal_derivative(const std::vector<double>& nodes, const Eigen::VectorXd& values, double s,
                                    double x, Side side, double h = -1.0);

// Local cubic Lagrange interpolation of nodal data and its derivative.
double interpolate_cubic(const std::vector<double>& nodes, const Eigen::VectorXd& values, double x);
double interpolate_cubic_derivative(const std::vector<double>& nodes, const Eigen::VectorXd& values, double x);

// (L v) = 0 at mesh nodes inside (alpha, beta); v = exterior_data elsewhere.
Eigen::VectorXd solve_exterior_value(const Fractional1DOperator& op, const Eigen::VectorXd& exterior_data,
                                     double alpha, double beta);

struct CounterexampleOptions {
  double s = 0.5;
  double epsilon = 0.5;
  double M_max = 64.0;
  int fit_nodes = 801;        // nodes across (-2, 2)
  double tikhonov = 1e-8;
};

struct CounterexampleResult {
  std::vector<double> nodes;
  Eigen::VectorXd v;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double c2_residual = 0.0;        // max |d^k (v - h*)|, k = 0,1,2, over (-2, 2)
  double band_residual = 0.0;      // same, restricted to the four bands
  double c2_residual_inner = 0.0;  // same, restricted to (-1, 1)
  double interior_residual = 0.0;  // max |L v| on (-1-delta1, 1+delta2)
  double normal_derivative_left = 0.0;
  double normal_derivative_right = 0.0;
  double M = 0.0;
  std::vector<std::pair<double, double>> history;  // (M, c2 residual)
};

void to_json(nlohmann::json& j, const CounterexampleResult& r);

// h* = h on [-1,1], 2x on |x| in [1+e/11, 1+2e/11], -2x on
// [1+3e/11, 1+4e/11], joined by quintic smoothsteps (and faded to 0 beyond
// 1+5e/11). Returns (h*, h*', h*'') at x.
struct Profile {
  double value, d1, d2;
};
using ProfileFn = std::function<Profile(double)>;
Profile target_profile(const ProfileFn& h, double epsilon, double x);

// Throws NoRootError when v' shows no sign change in a band.
CounterexampleResult construct_counterexample(const ProfileFn& h, const CounterexampleOptions& options);

// max |(-Laplace_N)^s w - (-d_xx)^s (zero extension of w)| over the basis
// nodes. `normalized` multiplies the integral operator by C_{1,s}.
double compare_operators(const SpectralFunction& w, double s, bool normalized = false);

}  // namespace stablecyl
