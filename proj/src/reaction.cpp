#include "stablecyl/reaction.hpp"

#include "stablecyl/errors.hpp"

#include <cmath>

namespace stablecyl {

std::string to_string(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::Linear: return "Linear";
    case ReactionKind::Constant: return "Constant";
    case ReactionKind::Cubic: return "Cubic";
    case ReactionKind::Polynomial: return "Polynomial";
    case ReactionKind::Exponential: return "Exponential";
    case ReactionKind::Custom: return "Custom";
  }
  return "?";
}

std::string to_string(Convexity c) {
  switch (c) {
    case Convexity::Unset: return "Unset";
    case Convexity::StrictlyConvex: return "StrictlyConvex";
    case Convexity::StrictlyConcave: return "StrictlyConcave";
  }
  return "?";
}

Convexity convexity_from_string(const std::string& name) {
  for (auto c : {Convexity::Unset, Convexity::StrictlyConvex, Convexity::StrictlyConcave}) {
    if (to_string(c) == name) return c;
  }
  throw ArgumentError("unknown convexity '" + name + "'");
}

namespace {

BulkFn zero_bulk() {
  return [](double, double) { return 0.0; };
}

ReactionSpec base(ReactionKind kind, std::vector<double> params, std::string label) {
  ReactionSpec r;
  r.kind = kind;
  r.params = std::move(params);
  r.label = std::move(label);
  r.g = zero_bulk();
  r.g_u = zero_bulk();
  return r;
}

}  // namespace

ReactionSpec ReactionSpec::linear(double k) {
  ReactionSpec r = base(ReactionKind::Linear, {k}, "Linear");
  r.f = [k](double u) { return k * u; };
  r.f_prime = [k](double) { return k; };
  r.f_second = [](double) { return 0.0; };
  return r;
}

ReactionSpec ReactionSpec::constant(double k) {
  ReactionSpec r = base(ReactionKind::Constant, {k}, "Constant");
  r.f = [k](double) { return k; };
  r.f_prime = [](double) { return 0.0; };
  r.f_second = [](double) { return 0.0; };
  return r;
}

ReactionSpec ReactionSpec::cubic() {
  ReactionSpec r = base(ReactionKind::Cubic, {}, "Cubic");
  r.f = [](double u) { return -u * u * u; };
  r.f_prime = [](double u) { return -3.0 * u * u; };
  r.f_second = [](double u) { return -6.0 * u; };
  return r;
}

ReactionSpec ReactionSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ArgumentError("polynomial reaction needs at least one coefficient");
  ReactionSpec r = base(ReactionKind::Polynomial, coeffs, "Polynomial");
  auto horner = [](const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  std::vector<double> d1, d2;
  for (size_t i = 1; i < coeffs.size(); ++i) d1.push_back(static_cast<double>(i) * coeffs[i]);
  for (size_t i = 1; i < d1.size(); ++i) d2.push_back(static_cast<double>(i) * d1[i]);
  r.f = [coeffs, horner](double u) { return horner(coeffs, u); };
  r.f_prime = [d1, horner](double u) { return d1.empty() ? 0.0 : horner(d1, u); };
  r.f_second = [d2, horner](double u) { return d2.empty() ? 0.0 : horner(d2, u); };
  return r;
}

ReactionSpec ReactionSpec::exponential(double scale, double rate) {
  ReactionSpec r = base(ReactionKind::Exponential, {scale, rate}, "Exponential");
  r.f = [scale, rate](double u) { return scale * std::exp(rate * u); };
  r.f_prime = [scale, rate](double u) { return scale * rate * std::exp(rate * u); };
  r.f_second = [scale, rate](double u) { return scale * rate * rate * std::exp(rate * u); };
  if (scale * rate * rate > 0.0) r.convexity = Convexity::StrictlyConvex;
  if (scale * rate * rate < 0.0) r.convexity = Convexity::StrictlyConcave;
  return r;
}

ReactionSpec ReactionSpec::custom(ScalarFn f, ScalarFn f_prime, ScalarFn f_second, std::string label) {
  if (!f) throw ArgumentError("custom reaction needs f");
  ReactionSpec r = base(ReactionKind::Custom, {}, std::move(label));
  constexpr double h = 1e-5;
  r.f = f;
  r.f_prime = f_prime ? std::move(f_prime) : ScalarFn([f](double u) { return (f(u + h) - f(u - h)) / (2 * h); });
  r.f_second = f_second ? std::move(f_second)
                        : ScalarFn([fp = r.f_prime](double u) { return (fp(u + h) - fp(u - h)) / (2 * h); });
  return r;
}

ReactionSpec& ReactionSpec::with_bulk(BulkFn g_fn, BulkFn g_u_fn) {
  if (!g_fn || !g_u_fn) throw ArgumentError("bulk term needs g and g_u");
  g = std::move(g_fn);
  g_u = std::move(g_u_fn);
  g_zero = false;
  return *this;
}

ReactionSpec& ReactionSpec::with_convexity(Convexity c) {
  convexity = c;
  return *this;
}

}  // namespace stablecyl
