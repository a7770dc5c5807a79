#include "generators.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/solver.hpp"

#include <doctest.h>

#include <numbers>

using namespace stablecyl;
constexpr double pi = std::numbers::pi;

namespace {

double max_diff(const CylinderField& a, const CylinderField& b) {
  return (a.values() - b.values()).lpNorm<Eigen::Infinity>();
}

CylinderField bump_below_top(const GridPtr& g, double amp) {
  const double Y = g->y_max();
  return sample(g, [&](const Point& p) { return amp * std::cos(p.x) * std::sin(pi * p.y / Y); });
}

}  // namespace

TEST_CASE("weak residual of exact catalog solutions") {
  const auto g = build_grid(DomainSpec::interval(0, 2 * pi), 33, 17, 2.0);
  const double Y = 2.0;
  const CylinderField phi = sample(g, [&](const Point& p) { return std::cos(p.x) * (1 - p.y / Y); });
  {
    const auto prob = catalog_problem(CatalogName::LinearY);
    CHECK(std::abs(residual_weak(catalog_solution(CatalogName::LinearY, {}, g), prob.model, prob.reaction, phi)) < 1e-12);
  }
  {
    const CylinderField c(g, 0.0);
    CHECK(nodal_residual(c, CoefficientModel::constant_one(), ReactionSpec::linear(1.0)).cwiseAbs().maxCoeff() < 1e-14);
  }
  {
    // Hat residuals below the top slice shrink faster than h^2.
    std::vector<double> r;
    for (int n : {17, 33, 65}) {
      const auto gn = build_grid(DomainSpec::interval(0, 2 * pi), n, n, 2.0);
      const auto prob = catalog_problem(CatalogName::DecayCos);
      const Eigen::VectorXd R = nodal_residual(catalog_solution(CatalogName::DecayCos, {}, gn), prob.model, prob.reaction);
      const double h = gn->max_spacing();
      double m = 0.0;
      for (int node = 0; node < gn->size(); ++node)
        if (gn->iy_of(node) < gn->ny() - 1) m = std::max(m, std::abs(R[node]));
      r.push_back(m / (h * h));
    }
    CHECK(r[2] < r[0]);
  }
  CylinderField top(g, 1.0);
  CHECK_THROWS_AS(residual_weak(CylinderField(g, 0.0), CoefficientModel::constant_one(), ReactionSpec::linear(1), top),
                  ArgumentError);
}

TEST_CASE("property: weak residual is linear in the test field") {
  gen::Rng rng(17);
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  for (int i = 0; i < 20; ++i) {
    const CylinderField u = gen::smooth_field(rng, g);
    CylinderField p1 = gen::smooth_field(rng, g), p2 = gen::smooth_field(rng, g);
    for (int s = 0; s < g->slice_size(); ++s) {
      p1.values()[s * g->ny() + g->ny() - 1] = 0.0;
      p2.values()[s * g->ny() + g->ny() - 1] = 0.0;
    }
    const auto model = CoefficientModel::mean_curvature_weight(0.0);
    const auto re = ReactionSpec::cubic();
    const double a = gen::uniform(rng, -2, 2), b = gen::uniform(rng, -2, 2);
    const CylinderField comb(g, Eigen::VectorXd(a * p1.values() + b * p2.values()));
    const double lhs = residual_weak(u, model, re, comb);
    const double rhs = a * residual_weak(u, model, re, p1) + b * residual_weak(u, model, re, p2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("newton: f = 0 converges to a constant") {
  gen::Rng rng(23);
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  const auto rep = solve_newton(CoefficientModel::constant_one(), ReactionSpec::constant(0.0), g,
                                gen::smooth_field(rng, g), 1e-10, 20);
  CHECK(rep.converged);
  CHECK(rep.u.values().maxCoeff() - rep.u.values().minCoeff() < 1e-8);
}

TEST_CASE("newton recovers e^{-y} cos x at second order") {
  std::vector<double> err;
  for (int n : {17, 33}) {
    const auto g = build_grid(DomainSpec::interval(0, 2 * pi), n, n, 2.0);
    const auto exact = catalog_solution(CatalogName::DecayCos, {}, g);
    const CylinderField init(g, Eigen::VectorXd(exact.values() + bump_below_top(g, 0.05).values()));
    const auto prob = catalog_problem(CatalogName::DecayCos);
    const auto rep = solve_newton(prob.model, prob.reaction, g, init, 1e-11, 20, TopCondition::Dirichlet);
    CHECK(rep.converged);
    CHECK(rep.final_residual <= 1e-11);
    err.push_back(max_diff(rep.u, exact));
  }
  CHECK(err[0] / err[1] > 3.5);
}

TEST_CASE("newton: a = e^y, f = 1 from zero") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 33, 2.0);
  const auto rep = solve_newton(CoefficientModel::exp_y(), ReactionSpec::constant(1.0), g, CylinderField(g, 0.0), 1e-12,
                                20, TopCondition::Dirichlet);
  CHECK(rep.converged);
  const double shift = std::exp(-2.0);
  const auto exact = sample(g, [&](const Point& p) { return std::exp(-p.y) - shift; });
  CHECK(max_diff(rep.u, exact) < 5.0 * g->max_spacing() * g->max_spacing());
}

TEST_CASE("newton with a gradient-dependent coefficient") {
  gen::Rng rng(29);
  const auto g = build_grid(DomainSpec::rectangle(0, pi, 0, pi), 9, 9, 2.0);
  const auto rep = solve_newton(CoefficientModel::mean_curvature_weight(0.0), ReactionSpec::polynomial({0, -1, 0, -1}),
                                g, gen::smooth_field(rng, g, 0.2), 1e-10, 40);
  CHECK(rep.converged);
  CHECK(rep.u.values().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("one-dimensional family") {
  const auto g = build_grid(DomainSpec::interval(0, 1), 3, 11, 2.0);
  CatalogParams p;
  p.c = 1.0;
  p.model = CoefficientModel::power_weight(0.0);
  p.reaction = ReactionSpec::constant(1.0);
  const auto u = catalog_solution(CatalogName::OneDimFamily, p, g);
  for (int i = 0; i < g->size(); ++i) CHECK(u[i] == doctest::Approx(1.0 - g->point(i).y).epsilon(1e-12));

  p.reaction = ReactionSpec::polynomial({1.0, -1.0});
  const auto flat = catalog_solution(CatalogName::OneDimFamily, p, g);
  CHECK(flat.values().isApproxToConstant(1.0));

  // Flux t a(t) = t / sqrt(1+t^2) = 1/2 gives t = 1/sqrt(3).
  p.model = CoefficientModel::mean_curvature_weight(0.0);
  p.reaction = ReactionSpec::constant(0.5);
  const auto mc = catalog_solution(CatalogName::OneDimFamily, p, g);
  CHECK(mc[g->index(0, 0, 10)] == doctest::Approx(1.0 - 2.0 / std::sqrt(3.0)).epsilon(1e-10));

  p.reaction = ReactionSpec::constant(2.0);
  CHECK_THROWS_AS(catalog_solution(CatalogName::OneDimFamily, p, g), DomainError);
}

TEST_CASE("catalog values and y dependence") {
  const auto g = build_grid(DomainSpec::interval(0, 2 * pi), 9, 5, 1.0);
  CHECK(catalog_solution(CatalogName::DecayCos, {}, g)[g->index(0, 0, 0)] == 1.0);
  CHECK(check_y_dependence(catalog_solution(CatalogName::LinearY, {}, g)) == 0.0);
  CHECK(check_y_dependence(sample(g, [](const Point& p) { return std::cos(p.x); })) == doctest::Approx(2.0));
}

TEST_CASE("extremum sign check") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  CHECK(extremum_sign_check(catalog_solution(CatalogName::LinearY, {}, g), ReactionSpec::constant(-1.0)));
  CHECK(extremum_sign_check(CylinderField(g, 1.0), ReactionSpec::polynomial({1.0, -1.0})));
  const auto e = extremum_details(catalog_solution(CatalogName::ExpDecay, {}, g), ReactionSpec::constant(1.0));
  CHECK(e.f_c == 1.0);
  CHECK_FALSE(e.holds());
  CHECK_FALSE(minimum_principle_hypotheses(CoefficientModel::exp_y(), ReactionSpec::constant(1.0)));
  CHECK(minimum_principle_hypotheses(CoefficientModel::constant_one(), ReactionSpec::constant(1.0)));
  CHECK(minimum_principle_hypotheses(CoefficientModel::mean_curvature_weight(0.0), ReactionSpec::cubic()));
  CHECK_FALSE(minimum_principle_hypotheses(CoefficientModel::power_weight_p_laplace(0.0, 3.0), ReactionSpec::cubic()));
}

TEST_CASE("solve report json") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 5, 5, 1.0);
  const auto rep = solve_newton(CoefficientModel::constant_one(), ReactionSpec::polynomial({1, -1}), g,
                                CylinderField(g, 0.5), 1e-12, 20);
  const nlohmann::json j = rep;
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("residual_history").size() == rep.residual_history.size());
}
