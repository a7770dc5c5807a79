#pragma once

#include <functional>
#include <string>
#include <vector>

namespace stablecyl {

enum class ReactionKind { Linear, Constant, Cubic, Polynomial, Exponential, Custom };
std::string to_string(ReactionKind kind);

enum class Convexity { Unset, StrictlyConvex, StrictlyConcave };
std::string to_string(Convexity c);
Convexity convexity_from_string(const std::string& name);

using ScalarFn = std::function<double(double)>;
using BulkFn = std::function<double(double y, double u)>;

// Boundary reaction f (with two derivatives) and bulk term g(y,u) with g_u.
struct ReactionSpec {
  ReactionKind kind = ReactionKind::Constant;
  std::string label;
  // Linear: {k}; Constant: {k}; Polynomial: ascending coefficients;
  // Exponential: {scale, rate} for f(u) = scale * exp(rate * u).
  std::vector<double> params;
  ScalarFn f, f_prime, f_second;
  BulkFn g, g_u;
  bool g_zero = true;
  Convexity convexity = Convexity::Unset;

  // f(u) = k u
  static ReactionSpec linear(double k);
  // f(u) = k
  static ReactionSpec constant(double k);
  // f(u) = -u^3
  static ReactionSpec cubic();
  // f(u) = sum_i c_i u^i
  static ReactionSpec polynomial(std::vector<double> coeffs);
  // f(u) = scale e^{rate u}
  static ReactionSpec exponential(double scale = 1.0, double rate = 1.0);
  // Derivatives left empty are replaced by centered differences.
  static ReactionSpec custom(ScalarFn f, ScalarFn f_prime = {}, ScalarFn f_second = {},
                             std::string label = "custom");

  ReactionSpec& with_bulk(BulkFn g_fn, BulkFn g_u_fn);
  ReactionSpec& with_convexity(Convexity c);
};

}  // namespace stablecyl
