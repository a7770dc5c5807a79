#include "generators.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/solver.hpp"
#include "stablecyl/stability.hpp"

#include <doctest.h>

#include <numbers>

using namespace stablecyl;
constexpr double pi = std::numbers::pi;

TEST_CASE("catalog stability labels on a moderate grid") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 33, 33, 8.0);
  auto label = [&](CatalogName n) {
    const auto prob = catalog_problem(n);
    return classify(catalog_solution(n, {}, g), prob.model, prob.reaction);
  };
  CHECK(label(CatalogName::LinearY).classification == Classification::Stable);
  CHECK(label(CatalogName::ExpDecay).classification == Classification::Stable);
  CHECK(label(CatalogName::GrowCos).classification == Classification::Stable);
  const auto unstable = label(CatalogName::DecayCos);
  CHECK(unstable.classification == Classification::Unstable);
  CHECK(unstable.mu1 < -1e-3);
  CHECK(unstable.eigen_residual <= 1e-8);
}

TEST_CASE("property: Lanczos eigenvalues agree with the dense oracle") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const bool rect = trial % 3 == 0;
    const auto dom = rect ? DomainSpec::rectangle(0, pi, 0, 2.0) : DomainSpec::interval(0, gen::uniform(rng, 1.0, 7.0));
    const auto g = build_grid(dom, rect ? 5 : 9, gen::integer(rng, 5, 9), gen::uniform(rng, 1.0, 4.0));
    const auto model = trial % 2 ? CoefficientModel::mean_curvature_weight(0.0) : CoefficientModel::constant_one();
    const auto re = ReactionSpec::polynomial({0.0, gen::uniform(rng, -2, 2), gen::uniform(rng, -1, 1)});
    const auto form = assemble_I(gen::smooth_field(rng, g, 0.5), model, re);
    const auto lz = min_rayleigh(form, 3);
    const auto dn = min_rayleigh_dense(form, 3);
    for (int k = 0; k < 3; ++k) CHECK(lz[k].value == doctest::Approx(dn[k].value).epsilon(1e-8).scale(1.0));
    CHECK((form.energy - Eigen::SparseMatrix<double>(form.energy.transpose())).norm() == 0.0);
    CHECK(form.mass.minCoeff() > 0.0);
    for (int node : form.dofs) CHECK(g->iy_of(node) < g->ny() - 1);
  }
}

TEST_CASE("f' = -1 makes the form positive") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  const auto form = assemble_I(CylinderField(g, 0.0), CoefficientModel::constant_one(), ReactionSpec::linear(-1.0));
  const auto pairs = min_rayleigh_dense(form, 1);
  CHECK(pairs[0].value > 0.0);
  const SignClass s = sign_trichotomy(pairs[0].field, 1e-6);
  CHECK((s == SignClass::StrictlyPositive || s == SignClass::StrictlyNegative));
}

TEST_CASE("sign trichotomy") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 5, 5, 1.0);
  CHECK(sign_trichotomy(CylinderField(g, 0.0), 1e-12) == SignClass::IdenticallyZero);
  CHECK(sign_trichotomy(CylinderField(g, 2.0), 1e-12) == SignClass::StrictlyPositive);
  CHECK(sign_trichotomy(CylinderField(g, -2.0), 1e-12) == SignClass::StrictlyNegative);
  CHECK(sign_trichotomy(sample(g, [](const Point& p) { return std::cos(p.x); }), 1e-12) == SignClass::Mixed);
  // Constant test functions: f' = 0 leaves only the stiffness; the ground state does not change sign.
  const auto form = assemble_I(CylinderField(g, 1.0), CoefficientModel::constant_one(), ReactionSpec::constant(0.0));
  const auto pairs = min_rayleigh_dense(form, 1);
  CHECK(sign_trichotomy(pairs[0].field, 1e-10) == SignClass::StrictlyPositive);
}

TEST_CASE("classification rule") {
  CHECK(classify_mu(1.0, 1e-6) == Classification::Stable);
  CHECK(classify_mu(-1.0, 1e-6) == Classification::Unstable);
  CHECK(to_string(Classification::Marginal) == "Marginal");
}

TEST_CASE("property: B energy plus J equals the a energy") {
  gen::Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
    const auto model = i % 2 ? CoefficientModel::mean_curvature_weight(gen::uniform(rng, 0.0, 0.5))
                             : CoefficientModel::power_weight_p_laplace(0.0, gen::uniform(rng, 1.5, 3.0));
    const auto u = gen::smooth_field(rng, g), phi = gen::smooth_field(rng, g);
    const double B = form_B_energy(u, model, phi), J = form_J(u, model, phi), A = form_a_energy(u, model, phi);
    CHECK(B + J == doctest::Approx(A).epsilon(1e-10));
    CHECK(form_J(u, CoefficientModel::constant_one(), phi) == 0.0);
    if (model.kind() == CoefficientKind::MeanCurvatureWeight) CHECK(form_J(u, model, u) >= 0.0);
  }
}

TEST_CASE("convexity gap") {
  Eigen::VectorXd ub(1);
  ub << 1.0;
  auto sq = ReactionSpec::polynomial({0, 0, 1});
  sq.with_convexity(Convexity::StrictlyConvex);
  CHECK(convexity_gap(ub, sq, 0.0) == doctest::Approx(1.0));
  auto ex = ReactionSpec::exponential();
  ex.with_convexity(Convexity::StrictlyConvex);
  CHECK(convexity_gap(ub, ex, 0.0) == doctest::Approx(1.0));
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 0.3);
  CHECK(convexity_gap(flat, ex, 0.3) == 0.0);
  CHECK_THROWS_AS(convexity_gap(ub, ReactionSpec::linear(1), 0.0), PreconditionError);
}

TEST_CASE("non-elliptic coefficients are rejected") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  const auto bad = CoefficientModel::custom([](double, double t) { return std::exp(-t * t); });
  const auto steep = sample(g, [](const Point& p) { return 3.0 * p.y; });
  CHECK_THROWS_AS(assemble_I(steep, bad, ReactionSpec::constant(0.0)), ModelError);
}

TEST_CASE("stability report json") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 9, 2.0);
  const auto rep = classify(CylinderField(g, 0.0), CoefficientModel::constant_one(), ReactionSpec::linear(-1.0));
  const nlohmann::json j = rep;
  CHECK(j.at("classification") == "Stable");
}
