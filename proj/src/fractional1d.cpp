#include "stablecyl/fractional1d.hpp"

#include "stablecyl/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace stablecyl {

Fractional1DOperator::Fractional1DOperator(double s, std::vector<double> nodes) : s_(s), nodes_(std::move(nodes)) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("fractional operator: s must lie in (0,1)");
  if (nodes_.size() < 3) throw ArgumentError("fractional operator: need at least 3 nodes");
  for (size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw ArgumentError("fractional operator: nodes must be strictly increasing");
}

Fractional1DOperator Fractional1DOperator::uniform(double s, double M, double h) {
  if (!(M > 0.0) || !(h > 0.0)) throw ArgumentError("fractional operator: M and h must be positive");
  const int cells = static_cast<int>(std::lround(2.0 * M / h));
  std::vector<double> nodes(cells + 1);
  for (int i = 0; i <= cells; ++i) nodes[i] = -M + 2.0 * M * i / cells;
  return Fractional1DOperator(s, std::move(nodes));
}

Fractional1DOperator Fractional1DOperator::graded(double s, double inner, double h, double M, double ratio) {
  if (!(inner > 0.0) || !(h > 0.0) || !(M > inner) || !(ratio >= 1.0))
    throw ArgumentError("fractional operator: need 0 < inner < M, h > 0, ratio >= 1");
  const int half = static_cast<int>(std::lround(inner / h));
  const double step = inner / half;
  std::vector<double> right;
  for (int i = 0; i <= half; ++i) right.push_back(step * i);
  double width = step;
  while (true) {
    width *= ratio;
    const double next = right.back() + width;
    if (next >= M - 0.5 * width) break;
    right.push_back(next);
  }
  right.push_back(M);
  std::vector<double> nodes;
  for (auto it = right.rbegin(); it != right.rend() - 1; ++it) nodes.push_back(-*it);
  nodes.insert(nodes.end(), right.begin(), right.end());
  return Fractional1DOperator(s, std::move(nodes));
}

int Fractional1DOperator::find_node(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (auto cand : {it - 1, it}) {
    if (cand < nodes_.begin() || cand >= nodes_.end()) continue;
    if (std::abs(*cand - x) < dist) {
      dist = std::abs(*cand - x);
      best = static_cast<int>(cand - nodes_.begin());
    }
  }
  if (best < 0) return -1;
  double h = 0.0;
  if (best > 0) h = nodes_[best] - nodes_[best - 1];
  if (best + 1 < size()) h = std::max(h, nodes_[best + 1] - nodes_[best]);
  return dist <= 1e-9 * h ? best : -1;
}

bool Fractional1DOperator::is_target(int i) const {
  if (i < 1 || i > size() - 2) return false;
  const double hl = nodes_[i] - nodes_[i - 1];
  const double hr = nodes_[i + 1] - nodes_[i];
  return std::abs(hl - hr) <= 1e-9 * std::max(hl, hr);
}

Eigen::VectorXd Fractional1DOperator::row(int i) const {
  if (!is_target(i)) throw DomainError("fractional operator: node " + std::to_string(i) + " is not a valid target");
  const int n = size();
  const double x = nodes_[i];
  const double s2 = 2.0 * s_;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);

  // Exterior of the mesh, where v = 0.
  w[i] += (std::pow(nodes_.back() - x, -s2) + std::pow(x - nodes_.front(), -s2)) / s2;

  // Adjacent cells: quadratic Taylor model, -v'' h^{2-2s} / (2-2s).
  const double h = nodes_[i + 1] - x;
  const double c = std::pow(h, -s2) / (2.0 - s2);
  w[i] += 2.0 * c;
  w[i - 1] -= c;
  w[i + 1] -= c;

  auto kernel = [&](double r) { return std::pow(r, -1.0 - s2); };
  for (int j = 0; j + 1 < n; ++j) {
    if (j == i || j + 1 == i) continue;
    // Distances to the near and far end of the cell.
    const bool right = j > i;
    const int near = right ? j : j + 1;
    const int far = right ? j + 1 : j;
    const double a = std::abs(nodes_[near] - x);
    const double b = std::abs(nodes_[far] - x);
    const double len = b - a;
    double m0, mt;
    if (a > 20.0 * len) {
      using GL = boost::math::quadrature::gauss<double, 8>;
      m0 = GL::integrate(kernel, a, b);
      mt = GL::integrate([&](double r) { return (r - a) / len * kernel(r); }, a, b);
    } else {
      m0 = (std::pow(a, -s2) - std::pow(b, -s2)) / s2;
      const double m1 = s_ == 0.5 ? std::log(b / a) : (std::pow(b, 1.0 - s2) - std::pow(a, 1.0 - s2)) / (1.0 - s2);
      mt = (m1 - a * m0) / len;
    }
    w[i] += m0;
    w[near] -= m0 - mt;
    w[far] -= mt;
  }
  return w;
}

Eigen::MatrixXd Fractional1DOperator::rows(const std::vector<int>& targets) const {
  Eigen::MatrixXd R(static_cast<int>(targets.size()), size());
  for (size_t r = 0; r < targets.size(); ++r) R.row(static_cast<int>(r)) = row(targets[r]).transpose();
  return R;
}

double apply_integral_fraclap(const Fractional1DOperator& op, const Eigen::VectorXd& v, double x) {
  if (v.size() != op.size()) throw ArgumentError("apply_integral_fraclap: v has the wrong length");
  const int i = op.find_node(x);
  if (i < 0) throw ArgumentError("apply_integral_fraclap: target is not a mesh node");
  if (!op.is_target(i)) throw DomainError("apply_integral_fraclap: target too close to the mesh edge");
  return op.row(i).dot(v);
}

double fractional_constant(double s) {
  return s * std::pow(4.0, s) * boost::math::tgamma(0.5 + s) / (std::sqrt(std::numbers::pi) * boost::math::tgamma(1.0 - s));
}

std::string to_string(Side side) { return side == Side::FromLeftInterval ? "FromLeftInterval" : "FromRightInterval"; }

namespace {

double richardson(const std::function<double(double)>& q, double s, double h) {
  constexpr int levels = 5;
  Eigen::MatrixXd A(levels, levels);
  Eigen::VectorXd b(levels);
  for (int j = 0; j < levels; ++j) {
    const double t = h * std::ldexp(1.0, -j);
    A(j, 0) = 1.0;
    for (int p = 1; p < levels; ++p) A(j, p) = std::pow(t, p - s);
    b[j] = q(t);
  }
  return A.colPivHouseholderQr().solve(b)[0];
}

int cubic_first(const std::vector<double>& nodes, double x) {
  const int n = static_cast<int>(nodes.size());
  if (n < 4) throw ArgumentError("cubic interpolation needs at least 4 nodes");
  if (x < nodes.front() || x > nodes.back()) throw ArgumentError("cubic interpolation outside the data range");
  int k = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()) - 1;
  k = std::clamp(k, 0, n - 2);
  return std::clamp(k - 1, 0, n - 4);
}

double lagrange(const std::vector<double>& nodes, const Eigen::VectorXd& values, int first, double x) {
  double sum = 0.0;
  for (int a = first; a < first + 4; ++a) {
    double l = 1.0;
    for (int b = first; b < first + 4; ++b)
      if (b != a) l *= (x - nodes[b]) / (nodes[a] - nodes[b]);
    sum += values[a] * l;
  }
  return sum;
}

double lagrange_derivative(const std::vector<double>& nodes, const Eigen::VectorXd& values, int first, double x) {
  double sum = 0.0;
  for (int a = first; a < first + 4; ++a) {
    double denom = 1.0;
    for (int b = first; b < first + 4; ++b)
      if (b != a) denom *= nodes[a] - nodes[b];
    double num = 0.0;
    for (int skip = first; skip < first + 4; ++skip) {
      if (skip == a) continue;
      double prod = 1.0;
      for (int b = first; b < first + 4; ++b)
        if (b != a && b != skip) prod *= x - nodes[b];
      num += prod;
    }
    sum += values[a] * num / denom;
  }
  return sum;
}

}  // namespace

double interpolate_cubic(const std::vector<double>& nodes, const Eigen::VectorXd& values, double x) {
  return lagrange(nodes, values, cubic_first(nodes, x), x);
}

double interpolate_cubic_derivative(const std::vector<double>& nodes, const Eigen::VectorXd& values, double x) {
  return lagrange_derivative(nodes, values, cubic_first(nodes, x), x);
}

double fractional_normal_derivative(const std::function<double(double)>& v, double s, double x, Side side, double h) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("fractional_normal_derivative: s must lie in (0,1)");
  if (!(h > 0.0)) throw ArgumentError("fractional_normal_derivative: h must be positive");
  const double inward = side == Side::FromLeftInterval ? -1.0 : 1.0;
  const double vx = v(x);
  return richardson([&](double t) { return (v(x + inward * t) - vx) / std::pow(t, s); }, s, h);
}

double fractional_normal_derivative(const std::vector<double>& nodes, const Eigen::VectorXd& values, double s,
                                    double x, Side side, double h) {
  if (static_cast<int>(nodes.size()) != values.size()) throw ArgumentError("fractional_normal_derivative: size mismatch");
  const int first = cubic_first(nodes, x);
  const double local = nodes[first + 2] - nodes[first + 1];
  if (h < 0.0) h = 0.5 * local;
  if (h > 2.0 * local) throw ArgumentError("fractional_normal_derivative: h exceeds the local resolution");
  return fractional_normal_derivative([&](double y) { return lagrange(nodes, values, first, y); }, s, x, side, h);
}

Eigen::VectorXd solve_exterior_value(const Fractional1DOperator& op, const Eigen::VectorXd& exterior_data,
                                     double alpha, double beta) {
  if (exterior_data.size() != op.size()) throw ArgumentError("solve_exterior_value: data has the wrong length");
  if (!(beta > alpha)) throw ArgumentError("solve_exterior_value: need alpha < beta");
  std::vector<int> inner, outer;
  for (int i = 0; i < op.size(); ++i) (op.nodes()[i] > alpha && op.nodes()[i] < beta ? inner : outer).push_back(i);
  Eigen::VectorXd v = exterior_data;
  if (inner.empty()) return v;
  const Eigen::MatrixXd R = op.rows(inner);
  const int m = static_cast<int>(inner.size());
  Eigen::MatrixXd A(m, m);
  for (int c = 0; c < m; ++c) A.col(c) = R.col(inner[c]);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int j : outer) rhs -= R.col(j) * exterior_data[j];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd vi = lu.solve(rhs);
  if (!vi.allFinite()) throw SolverError("solve_exterior_value: singular system");
  for (int c = 0; c < m; ++c) v[inner[c]] = vi[c];
  return v;
}

namespace {

double smooth(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
double smooth_d1(double t) { return t <= 0.0 || t >= 1.0 ? 0.0 : 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smooth_d2(double t) { return t <= 0.0 || t >= 1.0 ? 0.0 : 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

// (1 - sigma) A + sigma B with sigma = S((|x| - start) / width).
Profile blend(const Profile& A, const Profile& B, double x, double start, double width) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  const double t = (std::abs(x) - start) / width;
  const double sg = smooth(t), sg1 = smooth_d1(t) * sign / width, sg2 = smooth_d2(t) / (width * width);
  return {(1.0 - sg) * A.value + sg * B.value,
          (1.0 - sg) * A.d1 + sg * B.d1 + sg1 * (B.value - A.value),
          (1.0 - sg) * A.d2 + sg * B.d2 + 2.0 * sg1 * (B.d1 - A.d1) + sg2 * (B.value - A.value)};
}

}  // namespace

Profile target_profile(const ProfileFn& h, double epsilon, double x) {
  const double e = epsilon / 11.0;
  const double r = std::abs(x) - 1.0;
  const Profile up{2.0 * x, 2.0, 0.0};
  const Profile down{-2.0 * x, -2.0, 0.0};
  const Profile zero{0.0, 0.0, 0.0};
  if (r <= 0.0) return h(x);
  if (r < e) return blend(h(x), up, x, 1.0, e);
  if (r <= 2.0 * e) return up;
  if (r < 3.0 * e) return blend(up, down, x, 1.0 + 2.0 * e, e);
  if (r <= 4.0 * e) return down;
  if (r < 5.0 * e) return blend(down, zero, x, 1.0 + 4.0 * e, e);
  return zero;
}

void to_json(nlohmann::json& j, const CounterexampleResult& r) {
  j = nlohmann::json{{"delta1", r.delta1},
                     {"delta2", r.delta2},
                     {"c2_residual", r.c2_residual},
                     {"band_residual", r.band_residual},
                     {"c2_residual_inner", r.c2_residual_inner},
                     {"interior_residual", r.interior_residual},
                     {"normal_derivative_left", r.normal_derivative_left},
                     {"normal_derivative_right", r.normal_derivative_right},
                     {"M", r.M}};
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [M, res] : r.history) hist.push_back({{"M", M}, {"c2_residual", res}});
  j["history"] = hist;
}

namespace {

struct Fit {
  Fractional1DOperator op;
  Eigen::VectorXd v;
  double c2 = 0.0;
  double band = 0.0;
  double inner = 0.0;
};

Fit fit_level(const ProfileFn& h, const CounterexampleOptions& o, double M) {
  const double step = 4.0 / (o.fit_nodes + 1);
  constexpr int pad = 50;
  Fractional1DOperator op = Fractional1DOperator::graded(o.s, 2.0 + pad * step, step, M);
  const auto& x = op.nodes();
  const int n = op.size();

  std::vector<int> inner, unknown;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    if (x[i] > -2.0 + 1e-12 && x[i] < 2.0 - 1e-12) {
      inner.push_back(i);
    } else if (i != 0 && i != n - 1) {
      slot[i] = static_cast<int>(unknown.size());
      unknown.push_back(i);
    }
  }
  const int mi = static_cast<int>(inner.size());
  const int mu = static_cast<int>(unknown.size());

  // Interior values as a linear map of the free exterior values.
  const Eigen::MatrixXd R = op.rows(inner);
  Eigen::MatrixXd A(mi, mi), C(mi, mu);
  for (int c = 0; c < mi; ++c) A.col(c) = R.col(inner[c]);
  for (int c = 0; c < mu; ++c) C.col(c) = -R.col(unknown[c]);
  const Eigen::MatrixXd G = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(C);

  // P maps free exterior values to all node values.
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, mu);
  for (int c = 0; c < mi; ++c) P.row(inner[c]) = G.row(c);
  for (int c = 0; c < mu; ++c) P(unknown[c], c) = 1.0;

  std::vector<int> fit;
  for (int i : inner)
    if (i > 0 && i < n - 1) fit.push_back(i);
  const int mf = static_cast<int>(fit.size());
  Eigen::MatrixXd L(3 * mf + mu, mu);
  Eigen::VectorXd t(3 * mf + mu);
  for (int r = 0; r < mf; ++r) {
    const int i = fit[r];
    const Profile p = target_profile(h, o.epsilon, x[i]);
    L.row(r) = P.row(i);
    L.row(mf + r) = (P.row(i + 1) - P.row(i - 1)) / (2.0 * step);
    L.row(2 * mf + r) = (P.row(i + 1) - 2.0 * P.row(i) + P.row(i - 1)) / (step * step);
    t[r] = p.value;
    t[mf + r] = p.d1;
    t[2 * mf + r] = p.d2;
  }
  L.bottomRows(mu) = std::sqrt(o.tikhonov) * Eigen::MatrixXd::Identity(mu, mu);
  t.tail(mu).setZero();
  const Eigen::VectorXd g = L.colPivHouseholderQr().solve(t);

  Fit out{op, P * g};
  const double e = o.epsilon / 11.0;
  for (int i : fit) {
    const Profile p = target_profile(h, o.epsilon, x[i]);
    const double d0 = std::abs(out.v[i] - p.value);
    const double d1 = std::abs((out.v[i + 1] - out.v[i - 1]) / (2.0 * step) - p.d1);
    const double d2 = std::abs((out.v[i + 1] - 2.0 * out.v[i] + out.v[i - 1]) / (step * step) - p.d2);
    const double worst = std::max({d0, d1, d2});
    out.c2 = std::max(out.c2, worst);
    const double r = std::abs(x[i]) - 1.0;
    if ((r >= e && r <= 2.0 * e) || (r >= 3.0 * e && r <= 4.0 * e)) out.band = std::max(out.band, worst);
    if (std::abs(x[i]) < 1.0) out.inner = std::max(out.inner, worst);
  }
  return out;
}

// Root of v' on [lo, hi] (|x| increasing away from the origin), or NaN.
double derivative_root(const std::vector<double>& x, const Eigen::VectorXd& v, double lo, double hi) {
  const bool negative = hi < 0.0;
  std::vector<double> probe;
  for (double xi : x)
    if (xi >= std::min(lo, hi) && xi <= std::max(lo, hi)) probe.push_back(xi);
  if (negative) std::reverse(probe.begin(), probe.end());
  probe.insert(probe.begin(), lo);
  probe.push_back(hi);
  for (size_t k = 0; k + 1 < probe.size(); ++k) {
    double a = probe[k], b = probe[k + 1];
    double fa = interpolate_cubic_derivative(x, v, a), fb = interpolate_cubic_derivative(x, v, b);
    if (fa == 0.0) return a;
    if (fa * fb > 0.0) continue;
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = interpolate_cubic_derivative(x, v, m);
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    return 0.5 * (a + b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

CounterexampleResult construct_counterexample(const ProfileFn& h, const CounterexampleOptions& o) {
  if (!(o.epsilon > 0.0 && o.epsilon < 1.0)) throw ArgumentError("construct_counterexample: epsilon must lie in (0,1)");
  if (!(o.M_max >= 4.0)) throw ArgumentError("construct_counterexample: M must be at least 4");
  if (o.fit_nodes < 41) throw ArgumentError("construct_counterexample: too few fit nodes");

  CounterexampleResult res;
  std::optional<Fit> best;
  for (double M = 4.0; M <= o.M_max * (1.0 + 1e-12); M *= 2.0) {
    Fit f = fit_level(h, o, M);
    res.history.emplace_back(M, f.c2);
    const bool improved = !best || f.c2 < 0.9 * best->c2;
    if (!best || f.c2 < best->c2) {
      res.M = M;
      best = std::move(f);
    }
    if (!improved) break;
  }

  const auto& x = best->op.nodes();
  const Eigen::VectorXd& v = best->v;
  res.nodes = x;
  res.v = v;
  res.c2_residual = best->c2;
  res.band_residual = best->band;
  res.c2_residual_inner = best->inner;

  const double e = o.epsilon / 11.0;
  const double right = derivative_root(x, v, 1.0 + e, 1.0 + 4.0 * e);
  const double left = derivative_root(x, v, -1.0 - e, -1.0 - 4.0 * e);
  if (std::isnan(right) || std::isnan(left))
    throw NoRootError("construct_counterexample: v' keeps its sign on a band", res.band_residual);
  res.delta2 = right - 1.0;
  res.delta1 = -1.0 - left;

  for (int i = 0; i < best->op.size(); ++i) {
    if (x[i] > left && x[i] < right && best->op.is_target(i))
      res.interior_residual = std::max(res.interior_residual, std::abs(best->op.row(i).dot(v)));
  }
  res.normal_derivative_left = fractional_normal_derivative(x, v, o.s, left, Side::FromRightInterval);
  res.normal_derivative_right = fractional_normal_derivative(x, v, o.s, right, Side::FromLeftInterval);
  return res;
}

double compare_operators(const SpectralFunction& w, double s, bool normalized) {
  const SpectralBasis& basis = *w.basis;
  if (basis.domain().kind != DomainSpec::Kind::Interval)
    throw NotApplicableError("compare_operators: only intervals are supported");
  const Eigen::VectorXd spectral = apply_fractional(basis, s, w).on_omega();
  const Eigen::VectorXd values = w.on_omega();

  const int n = basis.nodes_per_side();
  const double a = basis.domain().x_min, b = basis.domain().x_max;
  const double h = (b - a) / (n - 1);
  constexpr int pad = 2;
  std::vector<double> nodes;
  for (int i = -pad; i < n + pad; ++i) nodes.push_back(i < n ? a + h * i : b + h * (i - n + 1));
  nodes[pad + n - 1] = b;
  Fractional1DOperator op(s, nodes);
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(op.size());
  for (int i = 0; i < n; ++i) ext[pad + i] = values[i];

  const double scale = normalized ? fractional_constant(s) : 1.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(spectral[i] - scale * op.row(pad + i).dot(ext)));
  return worst;
}

}  // namespace stablecyl
