#include "stablecyl/solver.hpp"

#include "fem.hpp"
#include "stablecyl/errors.hpp"

#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>

namespace stablecyl {

namespace {

void require_same_grid(const CylinderField& a, const CylinderField& b, const char* where) {
  if (!a.grid().same_as(b.grid())) throw ArgumentError(std::string(where) + ": fields live on different grids");
}

double max_abs_free(const Eigen::VectorXd& r, const std::vector<char>& fixed) {
  double m = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!fixed[i]) m = std::max(m, std::abs(r[i]));
  return m;
}

double sq_norm_free(const Eigen::VectorXd& r, const std::vector<char>& fixed) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!fixed[i]) s += r[i] * r[i];
  return s;
}

}  // namespace

Eigen::VectorXd nodal_residual(const CylinderField& u, const CoefficientModel& model,
                               const ReactionSpec& reaction) {
  return fem::assemble(u.grid(), u.values(), model, reaction, {true, false, false}).residual;
}

double residual_weak(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                     const CylinderField& phi) {
  require_same_grid(u, phi, "residual_weak");
  const auto& grid = u.grid();
  for (int s = 0; s < grid.slice_size(); ++s) {
    if (phi[s * grid.ny() + grid.ny() - 1] != 0.0) throw ArgumentError("residual_weak: phi must vanish on the top slice");
  }
  return nodal_residual(u, model, reaction).dot(phi.values());
}

void to_json(nlohmann::json& j, const SolveReport& report) {
  j = nlohmann::json{{"newton_iterations", report.newton_iterations},
                     {"final_residual", report.final_residual},
                     {"converged", report.converged},
                     {"tol", report.tol},
                     {"residual_history", report.residual_history}};
}

SolveReport solve_newton(const CoefficientModel& model, const ReactionSpec& reaction, const GridPtr& grid,
                         const CylinderField& init, double tol, int max_iter, TopCondition top) {
  if (!(tol > 0.0)) throw ArgumentError("solve_newton: tol must be positive");
  if (max_iter < 0) throw ArgumentError("solve_newton: max_iter must be nonnegative");
  if (!grid->same_as(init.grid())) throw ArgumentError("solve_newton: init lives on a different grid");
  if (!init.values().allFinite()) throw ArgumentError("solve_newton: init is not finite");

  const int size = grid->size();
  std::vector<char> fixed(size, 0);
  if (top == TopCondition::Dirichlet) {
    for (int s = 0; s < grid->slice_size(); ++s) fixed[s * grid->ny() + grid->ny() - 1] = 1;
  }
  const Eigen::VectorXd lumped = bulk_weights(*grid);

  SolveReport report;
  report.tol = tol;
  Eigen::VectorXd u = init.values();
  auto residual_at = [&](const Eigen::VectorXd& v) {
    return fem::assemble(*grid, v, model, reaction, {true, false, false}).residual;
  };

  Eigen::VectorXd best = u;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    fem::Assembly sys = fem::assemble(*grid, u, model, reaction, {true, true, false});
    const double norm = max_abs_free(sys.residual, fixed);
    report.residual_history.push_back(norm);
    if (norm < best_norm) {
      best_norm = norm;
      best = u;
    }
    report.newton_iterations = iter;
    if (norm <= tol || iter >= max_iter) break;

    Eigen::SparseMatrix<double>& J = sys.jacobian;
    Eigen::VectorXd rhs = -sys.residual;
    if (top == TopCondition::Dirichlet) {
      J.prune([&](int r, int c, double) { return !fixed[r] && !fixed[c]; });
      for (int i = 0; i < size; ++i) {
        if (fixed[i]) {
          J.coeffRef(i, i) = 1.0;
          rhs[i] = 0.0;
        }
      }
    }
    J.makeCompressed();

    auto solve = [&](const Eigen::SparseMatrix<double>& A, Eigen::VectorXd& out) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) return false;
      out = lu.solve(rhs);
      if (lu.info() != Eigen::Success || !out.allFinite()) return false;
      return out.lpNorm<Eigen::Infinity>() <= 1e8 * (1.0 + u.lpNorm<Eigen::Infinity>());
    };
    Eigen::VectorXd delta;
    if (!solve(J, delta)) {
      // Pure Neumann problems with f' = 0 have constants in the kernel.
      const double scale = J.diagonal().cwiseAbs().maxCoeff() / lumped.maxCoeff();
      Eigen::SparseMatrix<double> Jr = J;
      for (int i = 0; i < size; ++i)
        if (!fixed[i]) Jr.coeffRef(i, i) += 1e-10 * scale * lumped[i];
      if (!solve(Jr, delta)) throw SolverError("solve_newton: singular Jacobian", report.residual_history);
    }

    const double phi0 = sq_norm_free(sys.residual, fixed);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= std::ldexp(1.0, -20)) {
      const Eigen::VectorXd trial = u + alpha * delta;
      try {
        const Eigen::VectorXd r = residual_at(trial);
        if (r.allFinite() && sq_norm_free(r, fixed) <= (1.0 - 2e-4 * alpha) * phi0) {
          u = trial;
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
      } catch (const RangeError&) {
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  report.u = CylinderField(grid, best);
  report.final_residual = best_norm;
  report.converged = best_norm <= tol;
  return report;
}

std::string to_string(CatalogName name) {
  switch (name) {
    case CatalogName::DecayCos: return "DecayCos";
    case CatalogName::GrowCos: return "GrowCos";
    case CatalogName::LinearY: return "LinearY";
    case CatalogName::ExpDecay: return "ExpDecay";
    case CatalogName::OneDimFamily: return "OneDimFamily";
  }
  return "?";
}

CatalogName catalog_name_from_string(const std::string& name) {
  for (auto c : {CatalogName::DecayCos, CatalogName::GrowCos, CatalogName::LinearY, CatalogName::ExpDecay,
                 CatalogName::OneDimFamily}) {
    if (to_string(c) == name) return c;
  }
  throw ArgumentError("unknown catalog solution '" + name + "'");
}

CatalogProblem catalog_problem(CatalogName name, const CatalogParams& params) {
  switch (name) {
    case CatalogName::DecayCos: return {CoefficientModel::constant_one(), ReactionSpec::linear(1.0)};
    case CatalogName::GrowCos: return {CoefficientModel::constant_one(), ReactionSpec::linear(-1.0)};
    case CatalogName::LinearY: return {CoefficientModel::constant_one(), ReactionSpec::constant(-1.0)};
    case CatalogName::ExpDecay: return {CoefficientModel::exp_y(), ReactionSpec::constant(1.0)};
    case CatalogName::OneDimFamily:
      return {params.model.value_or(CoefficientModel::constant_one()),
              params.reaction.value_or(ReactionSpec::constant(1.0))};
  }
  throw ArgumentError("unknown catalog solution");
}

namespace {

// |u'(y)| for the one-dimensional family: the root t of t a(y,t) = |F|.
double flux_speed(const CoefficientModel& model, double y, double F) {
  const double target = std::abs(F) * (model.y_power() == 0.0 ? 1.0 : std::pow(y, -model.y_power()));
  auto h = [&](double t) { return t * model.a_reduced(y, t) - target; };
  if (model.t_independent()) return target / model.a_reduced(y, 0.0);
  double hi = std::max(1.0, target);
  int guard = 0;
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw DomainError("one-dimensional family: flux " + std::to_string(F) + " not attainable", std::make_pair(y, hi));
  }
  boost::uintmax_t iters = 200;
  auto [lo_t, hi_t] = boost::math::tools::toms748_solve(h, 0.0, hi, -target, h(hi),
                                                         boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (lo_t + hi_t);
}

}  // namespace

CylinderField catalog_solution(CatalogName name, const CatalogParams& params, const GridPtr& grid) {
  switch (name) {
    case CatalogName::DecayCos: return sample(grid, [](const Point& p) { return std::exp(-p.y) * std::cos(p.x); });
    case CatalogName::GrowCos: return sample(grid, [](const Point& p) { return std::exp(p.y) * std::cos(p.x); });
    case CatalogName::LinearY: return sample(grid, [](const Point& p) { return p.y; });
    case CatalogName::ExpDecay: return sample(grid, [](const Point& p) { return std::exp(-p.y); });
    case CatalogName::OneDimFamily: break;
  }
  const CatalogProblem problem = catalog_problem(name, params);
  const double F = problem.reaction.f(params.c);
  if (F == 0.0) return CylinderField(grid, params.c);
  if (problem.model.y_power() >= 1.0) throw DomainError("one-dimensional family: 1/a is not integrable at y = 0");

  auto integrand = [&](double y) { return flux_speed(problem.model, y, F); };
  const auto& ys = grid->y_nodes();
  std::vector<double> profile(ys.size(), params.c);
  double acc = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (size_t j = 1; j < ys.size(); ++j) {
    double piece = 0.0;
    double err = 0.0;
    try {
      if (j == 1) {
        piece = ts.integrate(integrand, ys[0], ys[1], 1e-12, &err);
      } else {
        piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, ys[j - 1], ys[j], 8, 1e-13, &err);
      }
    } catch (const std::domain_error&) {
      throw DomainError("one-dimensional family: 1/a is not integrable near y = 0");
    } catch (const std::exception& e) {
      throw DomainError(std::string("one-dimensional family: quadrature failed: ") + e.what());
    }
    if (!std::isfinite(piece) || err > 1e-6 * (1.0 + std::abs(piece)))
      throw DomainError("one-dimensional family: 1/a is not integrable near y = 0");
    acc += piece;
    profile[j] = params.c - (F > 0.0 ? acc : -acc);
  }
  Eigen::VectorXd v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v[i] = profile[grid->iy_of(i)];
  return CylinderField(grid, std::move(v));
}

double check_y_dependence(const CylinderField& u) {
  const auto& grid = u.grid();
  double worst = 0.0;
  for (int j = 0; j < grid.ny(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < grid.slice_size(); ++s) {
      const double v = u[s * grid.ny() + j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

ExtremumReport extremum_details(const CylinderField& u, const ReactionSpec& reaction) {
  const auto& grid = u.grid();
  ExtremumReport r;
  r.c = u.values().minCoeff();
  r.bottom_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.slice_size(); ++s) r.bottom_min = std::min(r.bottom_min, u[s * grid.ny()]);
  r.f_c = reaction.f(r.c);
  r.min_on_bottom = std::abs(r.bottom_min - r.c) <= 1e-8;
  r.f_c_nonpositive = r.f_c <= 1e-8;
  return r;
}

bool extremum_sign_check(const CylinderField& u, const ReactionSpec& reaction) {
  return extremum_details(u, reaction).holds();
}

bool minimum_principle_hypotheses(const CoefficientModel& model, const ReactionSpec& reaction) {
  if (!reaction.g_zero) return false;
  for (double y : default_y_samples())
    for (double t : default_t_samples())
      if (t > 0.0 && eval_a_t(model, y, t) > 1e-14 * eval_a(model, y, t)) return false;
  try {
    auto q = [&](double R) {
      auto a0 = [&](double y) { return eval_a(model, y, 0.0); };
      return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(a0, R, 2.0 * R, 8, 1e-10) / (R * R);
    };
    const double q10 = q(10.0);
    const double q100 = q(100.0);
    return std::isfinite(q100) && q100 < q10;
  } catch (const RangeError&) {
    return false;
  }
}

}  // namespace stablecyl
