#include "stablecyl/errors.hpp"
#include "stablecyl/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace stablecyl;
constexpr double pi = std::numbers::pi;

TEST_CASE("cutoff profile") {
  const double R = 400.0;
  CHECK(cutoff_tau(R, 5.0) == 0.0);
  CHECK(cutoff_tau(R, 20.0) == doctest::Approx(0.0));
  CHECK(cutoff_tau(R, 21.0) == doctest::Approx(1.0));
  CHECK(cutoff_tau(R, 200.0) == 1.0);
  CHECK(cutoff_tau(R, 399.0) == doctest::Approx(1.0));
  CHECK(cutoff_tau(R, 400.0) == doctest::Approx(0.0));
  CHECK(cutoff_tau(R, 450.0) == 0.0);
  CHECK(log_cutoff_value(R, R) == doctest::Approx(0.0));
  // psi' = -tau/y; flat below sqrt R.
  CHECK(log_cutoff_value(R, 1.0) == doctest::Approx(log_cutoff_value(R, 19.0)));
  for (double y : {20.5, 100.0, 300.0, 399.5}) {
    const double d = 1e-4;
    const double fd = (log_cutoff_value(R, y + d) - log_cutoff_value(R, y - d)) / (2 * d);
    CHECK(fd == doctest::Approx(-cutoff_tau(R, y) / y).epsilon(1e-6));
  }
  CHECK(log_cutoff_value(R, 50.0) - log_cutoff_value(R, 200.0) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
  CHECK_THROWS_AS(log_cutoff_value(50.0, 1.0), PreconditionError);
}

TEST_CASE("level-set geometry of concentric circles") {
  const double cx = -1.0, cz = -1.0;
  const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), 65, 3, 1.0);
  const auto u = sample(g, [&](const Point& p) { return (p.x - cx) * (p.x - cx) + (p.z - cz) * (p.z - cz); });
  const auto geo = level_set_weights(u, 0, 1e-8);
  double errK = 0, errS = 0, tang = 0;
  for (int ix = 2; ix < 63; ++ix)
    for (int iz = 2; iz < 63; ++iz) {
      const int s = g->slice_index(ix, iz);
      REQUIRE(geo.mask[s]);
      const Point p = g->point(g->index(ix, iz, 0));
      const double r = std::hypot(p.x - cx, p.z - cz);
      errK = std::max(errK, std::abs(geo.K[s] - 1.0 / r));
      errS = std::max(errS, std::abs(geo.speed[s] - 2.0 * r));
      tang = std::max(tang, std::abs(geo.tangential_gradient_of_speed[s]));
    }
  CHECK(errK < 1e-3);
  CHECK(errS < 1e-10);
  CHECK(tang < 1e-3);
}

TEST_CASE("straight level lines have zero curvature") {
  const auto g = build_grid(DomainSpec::rectangle(0, pi, 0, pi), 17, 3, 1.0);
  const auto u = sample(g, [](const Point& p) { return 2.0 * p.x + p.z; });
  const auto geo = level_set_weights(u, 1, 1e-8);
  CHECK(geo.K.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(geo.speed.maxCoeff() == doctest::Approx(std::sqrt(5.0)));
  const auto wd = weight_decomposition(u, CoefficientModel::constant_one(), 1, 1e-8);
  CHECK(wd.bracket.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(wd.decomposed.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("level sets require a rectangle and a positive threshold") {
  const auto gi = build_grid(DomainSpec::interval(0, pi), 9, 3, 1.0);
  CHECK_THROWS(level_set_weights(CylinderField(gi, 0.0), 0, 1e-8));
  const auto gr = build_grid(DomainSpec::rectangle(0, pi, 0, pi), 9, 3, 1.0);
  CHECK_THROWS(level_set_weights(CylinderField(gr, 0.0), 0, 0.0));
}

TEST_CASE("bracket equals its decomposition on curved level sets") {
  std::vector<double> err;
  for (int n : {33, 65}) {
    const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), n, 3, 1.0);
    const auto u = sample(g, [](const Point& p) { return std::hypot(p.x + 1.0, p.z + 0.5) + p.y; });
    const auto wd = weight_decomposition(u, CoefficientModel::mean_curvature_weight(0.0), 0, 1e-8);
    double e = 0;
    for (int ix = 2; ix < n - 2; ++ix)
      for (int iz = 2; iz < n - 2; ++iz) {
        const int s = g->slice_index(ix, iz);
        e = std::max(e, std::abs(wd.bracket[s] - wd.decomposed[s]));
      }
    err.push_back(e);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[1] < 1e-2);
}

TEST_CASE("poincare sides") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 33, 33, 8.0);
  const auto u = sample(g, [](const Point& p) { return std::cos(p.x) * std::exp(p.y) ; });
  const auto psi = log_cutoff(1e4, g);
  const auto sides = poincare_sides(u, CoefficientModel::constant_one(), ReactionSpec::linear(-1.0), psi);
  CHECK(sides.lhs_lateral_exact == 0.0);
  CHECK(sides.gap() == doctest::Approx(sides.lhs_bulk - sides.rhs));
  CHECK(lateral_boundary_term_exact(u, CoefficientModel::constant_one(), psi) == 0.0);
  const nlohmann::json j = sides;
  CHECK(j.contains("rhs"));
  CHECK(j.contains("lhs_bulk"));
}

TEST_CASE("one-dimensional slices carry no bracket") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 17, 9, 2.0);
  const auto u = sample(g, [](const Point& p) { return std::sin(p.x) * std::exp(-p.y); });
  const Eigen::VectorXd w = bracket_field_reduced(u, CoefficientModel::mean_curvature_weight(0.0), 1e-10);
  CHECK(w.cwiseAbs().maxCoeff() < 1e-10);
}
