#include "stablecyl/spectral.hpp"

#include "stablecyl/coefficients.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/solver.hpp"

#include <Eigen/QR>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace stablecyl {

namespace {

double mode_factor(int m, double length, double offset) {
  if (m == 0) return 1.0 / std::sqrt(length);
  return std::sqrt(2.0 / length) * std::cos(m * std::numbers::pi * offset / length);
}

double mode_sup(int m, double length) { return m == 0 ? 1.0 / std::sqrt(length) : std::sqrt(2.0 / length); }

std::vector<double> uniform(double a, double b, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = a + (b - a) * i / (count - 1);
  v.back() = b;
  return v;
}

Eigen::VectorXd trapezoid(const std::vector<double>& nodes) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<int>(nodes.size()));
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

SpectralBasis::SpectralBasis(DomainSpec domain, int K, int nodes_per_side) : domain_(domain), nodes_(nodes_per_side) {
  if (K < 1) throw ArgumentError("neumann_basis: K must be >= 1");
  if (nodes_per_side < 3) throw ArgumentError("neumann_basis: need at least 3 nodes per side");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double Lx = domain.length_x();
  xs_ = uniform(domain.x_min, domain.x_max, nodes_);
  if (domain.kind == DomainSpec::Kind::Interval) {
    zs_ = {0.0};
    for (int m = 0; m < K; ++m) {
      lambdas_.push_back(pi2 * m * m / (Lx * Lx));
      modes_.push_back({m, 0});
    }
    return;
  }
  const double Lz = domain.length_z();
  zs_ = uniform(domain.z_min, domain.z_max, nodes_);
  for (int N = static_cast<int>(std::ceil(std::sqrt(K))) + 1;; N *= 2) {
    std::vector<std::tuple<long long, int, int, double>> all;
    for (int m1 = 0; m1 <= N; ++m1) {
      for (int m2 = 0; m2 <= N; ++m2) {
        const double lam = pi2 * (static_cast<double>(m1) * m1 / (Lx * Lx) + static_cast<double>(m2) * m2 / (Lz * Lz));
        all.emplace_back(std::llround(lam * 1e8), m1, m2, lam);
      }
    }
    if (static_cast<int>(all.size()) < K) continue;
    std::sort(all.begin(), all.end());
    const double bound = pi2 * std::pow(N + 1, 2) / std::pow(std::max(Lx, Lz), 2);
    if (std::get<3>(all[K - 1]) >= bound) continue;
    for (int k = 0; k < K; ++k) {
      lambdas_.push_back(std::get<3>(all[k]));
      modes_.push_back({std::get<1>(all[k]), std::get<2>(all[k])});
    }
    return;
  }
}

double SpectralBasis::eval(int k, double x, double z) const {
  const auto [m1, m2] = modes_[k];
  double v = mode_factor(m1, domain_.length_x(), x - domain_.x_min);
  if (domain_.kind == DomainSpec::Kind::Rectangle) v *= mode_factor(m2, domain_.length_z(), z - domain_.z_min);
  return v;
}

double SpectralBasis::sup_norm(int k) const {
  const auto [m1, m2] = modes_[k];
  double v = mode_sup(m1, domain_.length_x());
  if (domain_.kind == DomainSpec::Kind::Rectangle) v *= mode_sup(m2, domain_.length_z());
  return v;
}

Eigen::VectorXd SpectralBasis::omega_weights() const {
  const Eigen::VectorXd wx = trapezoid(xs_);
  if (domain_.kind == DomainSpec::Kind::Interval) return wx;
  const Eigen::VectorXd wz = trapezoid(zs_);
  Eigen::VectorXd w(omega_size());
  for (int i = 0; i < nodes_; ++i)
    for (int j = 0; j < nodes_; ++j) w[i * nodes_ + j] = wx[i] * wz[j];
  return w;
}

Eigen::VectorXd SpectralBasis::eigenfield(int k) const {
  Eigen::VectorXd v(omega_size());
  const int nz = static_cast<int>(zs_.size());
  for (int i = 0; i < nodes_; ++i)
    for (int j = 0; j < nz; ++j) v[i * nz + j] = eval(k, xs_[i], zs_[j]);
  return v;
}

Eigen::VectorXd SpectralBasis::eigenfield_on(int k, const CylinderGrid& grid) const {
  if (!(grid.domain() == domain_)) throw ArgumentError("spectral basis and grid have different domains");
  Eigen::VectorXd v(grid.slice_size());
  for (int ix = 0; ix < grid.nx(); ++ix)
    for (int iz = 0; iz < grid.nz(); ++iz) v[grid.slice_index(ix, iz)] = eval(k, grid.x_nodes()[ix], grid.z_nodes()[iz]);
  return v;
}

BasisPtr neumann_basis(const DomainSpec& domain, int K, int nodes_per_side) {
  return std::make_shared<const SpectralBasis>(domain, K, nodes_per_side);
}

double SpectralFunction::h_half_seminorm_sq() const {
  double s = 0.0;
  for (int k = 0; k < coeffs.size(); ++k) s += std::sqrt(basis->lambda(k)) * coeffs[k] * coeffs[k];
  return s;
}

double SpectralFunction::nonconstant_energy() const {
  return coeffs.size() > 1 ? coeffs.tail(coeffs.size() - 1).squaredNorm() : 0.0;
}

Eigen::VectorXd SpectralFunction::on_omega() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis->omega_size());
  for (int k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0.0) v += coeffs[k] * basis->eigenfield(k);
  return v;
}

void to_json(nlohmann::json& j, const SpectralFunction& w) {
  const auto& d = w.basis->domain();
  nlohmann::json dom{{"kind", to_string(d.kind)}, {"x_min", d.x_min}, {"x_max", d.x_max}};
  if (d.kind == DomainSpec::Kind::Rectangle) {
    dom["z_min"] = d.z_min;
    dom["z_max"] = d.z_max;
  }
  j = nlohmann::json{{"domain", dom},
                     {"K", w.basis->K()},
                     {"nodes_per_side", w.basis->nodes_per_side()},
                     {"coeffs", std::vector<double>(w.coeffs.data(), w.coeffs.data() + w.coeffs.size())}};
}

SpectralFunction spectral_function_from_json(const nlohmann::json& j) {
  const auto& dom = j.at("domain");
  const std::string kind = dom.at("kind").get<std::string>();
  DomainSpec d;
  if (kind == "Interval") {
    d = DomainSpec::interval(dom.at("x_min").get<double>(), dom.at("x_max").get<double>());
  } else if (kind == "Rectangle") {
    d = DomainSpec::rectangle(dom.at("x_min").get<double>(), dom.at("x_max").get<double>(),
                              dom.at("z_min").get<double>(), dom.at("z_max").get<double>());
  } else {
    throw ArgumentError("unknown domain kind '" + kind + "'");
  }
  const int K = j.at("K").get<int>();
  const auto coeffs = j.at("coeffs").get<std::vector<double>>();
  if (static_cast<int>(coeffs.size()) != K) throw ArgumentError("spectral function: coefficient count differs from K");
  SpectralFunction w;
  w.basis = neumann_basis(d, K, j.value("nodes_per_side", 129));
  w.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), K);
  return w;
}

SpectralFunction project(const BasisPtr& basis, const Eigen::VectorXd& omega_values) {
  if (omega_values.size() != basis->omega_size()) throw ArgumentError("project: wrong number of Omega values");
  const Eigen::VectorXd wv = basis->omega_weights().cwiseProduct(omega_values);
  SpectralFunction out{basis, Eigen::VectorXd(basis->K())};
  for (int k = 0; k < basis->K(); ++k) out.coeffs[k] = basis->eigenfield(k).dot(wv);
  return out;
}

SpectralFunction apply_fractional(const SpectralBasis& basis, double s, const SpectralFunction& w) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("apply_fractional: s must lie in (0,1)");
  if (w.basis.get() != &basis && !(w.basis->domain() == basis.domain() && w.basis->K() == basis.K()))
    throw ArgumentError("apply_fractional: function belongs to another basis");
  SpectralFunction out{w.basis, Eigen::VectorXd(w.coeffs.size())};
  for (int k = 0; k < w.coeffs.size(); ++k) out.coeffs[k] = k == 0 && basis.lambda(0) == 0.0 ? 0.0 : std::pow(basis.lambda(k), s) * w.coeffs[k];
  return out;
}

SemilinearReport solve_semilinear(const BasisPtr& basis, double s, const ReactionSpec& reaction,
                                  const SpectralFunction& init, double tol, int max_iter) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("solve_semilinear: s must lie in (0,1)");
  if (!(tol > 0.0)) throw ArgumentError("solve_semilinear: tol must be positive");
  const int K = basis->K();
  if (init.coeffs.size() != K) throw ArgumentError("solve_semilinear: init has the wrong length");
  const int max_mode = (basis->nodes_per_side() - 1) / 2;
  for (int k = 0; k < K; ++k) {
    const auto [m1, m2] = basis->mode(k);
    if (m1 > max_mode || m2 > max_mode) throw ArgumentError("solve_semilinear: K too large for the quadrature grid (aliasing)");
  }

  const int nq = basis->omega_size();
  Eigen::MatrixXd Phi(nq, K);
  for (int k = 0; k < K; ++k) Phi.col(k) = basis->eigenfield(k);
  const Eigen::VectorXd W = basis->omega_weights();
  Eigen::VectorXd lam_s(K);
  for (int k = 0; k < K; ++k) lam_s[k] = basis->lambda(k) == 0.0 ? 0.0 : std::pow(basis->lambda(k), s);

  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd vals = Phi * v;
    Eigen::VectorXd fw(nq);
    for (int i = 0; i < nq; ++i) fw[i] = W[i] * reaction.f(vals[i]);
    return Eigen::VectorXd(lam_s.cwiseProduct(v) - Phi.transpose() * fw);
  };

  SemilinearReport rep;
  Eigen::VectorXd v = init.coeffs;
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd r = residual(v);
    const double norm = r.lpNorm<Eigen::Infinity>();
    rep.residual_history.push_back(norm);
    rep.iterations = iter;
    if (!std::isfinite(norm)) throw SolverError("solve_semilinear: residual is not finite", rep.residual_history);
    if (norm <= tol) break;
    if (iter >= max_iter) throw SolverError("solve_semilinear: no convergence within max_iter", rep.residual_history);

    const Eigen::VectorXd vals = Phi * v;
    Eigen::VectorXd dw(nq);
    for (int i = 0; i < nq; ++i) dw[i] = W[i] * reaction.f_prime(vals[i]);
    Eigen::MatrixXd J = -Phi.transpose() * dw.asDiagonal() * Phi;
    J.diagonal() += lam_s;
    const Eigen::VectorXd delta = J.completeOrthogonalDecomposition().solve(-r);
    if (!delta.allFinite()) throw SolverError("solve_semilinear: singular Jacobian", rep.residual_history);

    const double phi0 = r.squaredNorm();
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= std::ldexp(1.0, -20)) {
      const Eigen::VectorXd trial = v + alpha * delta;
      const Eigen::VectorXd rt = residual(trial);
      if (rt.allFinite() && rt.squaredNorm() <= (1.0 - 2e-4 * alpha) * phi0) {
        v = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw SolverError("solve_semilinear: line search stalled (singular Jacobian?)", rep.residual_history);
  }
  rep.v = SpectralFunction{basis, v};
  rep.final_residual = rep.residual_history.back();
  rep.converged = true;
  return rep;
}

namespace {

CylinderField extend_with_profile(const SpectralBasis& basis, const SpectralFunction& v, const GridPtr& grid,
                                  const std::function<double(double)>& profile) {
  if (!(grid->domain() == basis.domain())) throw ArgumentError("extension: grid and basis domains differ");
  if (v.coeffs.size() != basis.K()) throw ArgumentError("extension: coefficient count differs from K");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(grid->size());
  const int ny = grid->ny();
  for (int k = 0; k < basis.K(); ++k) {
    if (v.coeffs[k] == 0.0) continue;
    const Eigen::VectorXd phi = basis.eigenfield_on(k, *grid);
    const double root = std::sqrt(basis.lambda(k));
    std::vector<double> decay(ny);
    for (int j = 0; j < ny; ++j) decay[j] = root == 0.0 ? 1.0 : profile(root * grid->y_nodes()[j]);
    for (int s = 0; s < grid->slice_size(); ++s)
      for (int j = 0; j < ny; ++j) u[s * ny + j] += v.coeffs[k] * phi[s] * decay[j];
  }
  return CylinderField(grid, std::move(u));
}

}  // namespace

CylinderField extend_harmonic(const SpectralBasis& basis, const SpectralFunction& v, const GridPtr& grid) {
  return extend_with_profile(basis, v, grid, [](double t) { return std::exp(-t); });
}

CylinderField extend_fractional(const SpectralBasis& basis, const SpectralFunction& v, double s, const GridPtr& grid) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("extend_fractional: s must lie in (0,1)");
  const double c = std::pow(2.0, 1.0 - s) / boost::math::tgamma(s);
  return extend_with_profile(basis, v, grid, [s, c](double t) {
    if (t == 0.0) return 1.0;
    if (t > 700.0) return 0.0;
    return c * std::pow(t, s) * boost::math::cyl_bessel_k(s, t);
  });
}

GrowthReport eig_growth_check(const SpectralBasis& basis, double beta) {
  const int n = basis.domain().n();
  if (!(beta > 0.0 && beta < 2.0 / n)) throw PreconditionError("eig_growth_check: beta must lie in (0, 2/n)");
  if (basis.K() < 50) throw PreconditionError("eig_growth_check: basis needs at least 50 modes");
  GrowthReport rep;
  int last_fail = 0;
  for (int k = 1; k < basis.K(); ++k)
    if (!(basis.lambda(k) > std::pow(k, beta))) last_fail = k;
  rep.K_beta = last_fail + 1;

  const int m = basis.K() - 1;
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (int k = 1; k < basis.K(); ++k) {
    A(k - 1, 0) = std::log(basis.lambda(k));
    A(k - 1, 1) = 1.0;
    b[k - 1] = std::log(basis.sup_norm(k));
  }
  const Eigen::Vector2d fit = A.colPivHouseholderQr().solve(b);
  rep.C2 = fit[0];
  rep.C1 = std::exp(fit[1]);
  return rep;
}

double extension_equivalence(const BasisPtr& basis, const ReactionSpec& reaction, const GridPtr& grid, double tol,
                             const SpectralFunction* init) {
  if (!(grid->domain() == basis->domain())) throw ArgumentError("extension_equivalence: grid and basis domains differ");
  const SpectralFunction start = init ? *init : SpectralFunction{basis, Eigen::VectorXd::Zero(basis->K())};
  const SemilinearReport sol = solve_semilinear(basis, 0.5, reaction, start, tol, 200);
  const CylinderField u = extend_harmonic(*basis, sol.v, grid);
  const Eigen::VectorXd R = nodal_residual(u, CoefficientModel::constant_one(), reaction);

  const double Y = grid->y_max();
  const auto& dom = grid->domain();
  const double pi = std::numbers::pi;
  std::vector<std::function<double(const Point&)>> battery;
  for (int m = 0; m <= 2; ++m) {
    battery.push_back([=](const Point& p) {
      const double cx = std::cos(m * pi * (p.x - dom.x_min) / dom.length_x());
      return cx * std::pow(1.0 - p.y / Y, 2);
    });
  }
  battery.push_back([=](const Point& p) { return std::exp(-p.y) * (1.0 - p.y / Y); });
  if (dom.kind == DomainSpec::Kind::Rectangle) {
    battery.push_back([=](const Point& p) {
      return std::cos(pi * (p.z - dom.z_min) / dom.length_z()) * std::pow(1.0 - p.y / Y, 2);
    });
  }
  double worst = 0.0;
  for (const auto& fn : battery) {
    CylinderField phi = sample(grid, fn);
    for (int s = 0; s < grid->slice_size(); ++s) phi.values()[s * grid->ny() + grid->ny() - 1] = 0.0;
    worst = std::max(worst, std::abs(R.dot(phi.values())));
  }
  return worst;
}

}  // namespace stablecyl
