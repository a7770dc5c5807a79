#include "generators.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/errors.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace stablecyl;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid construction") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 5, 3, 1.0);
  CHECK(g->y_nodes() == std::vector<double>{0.0, 0.5, 1.0});
  const auto graded = build_grid(DomainSpec::interval(0, pi), 5, 3, 1.0, 1.0);
  CHECK(graded->y_nodes()[1] == doctest::Approx(0.25));
  const auto r = build_grid(DomainSpec::rectangle(0, 1, 0, 2), 4, 3, 1.0);
  CHECK(r->slice_size() == 16);
  CHECK(r->size() == 48);
  CHECK_THROWS_AS(build_grid(DomainSpec::interval(0, 1), 2, 3, 1.0), ArgumentError);
  CHECK_THROWS_AS(build_grid(DomainSpec::interval(0, 1), 5, 3, -1.0), ArgumentError);
}

TEST_CASE("node numbering round-trips") {
  const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 2), 4, 5, 1.0);
  for (int node = 0; node < g->size(); ++node)
    CHECK(g->index(g->ix_of(node), g->iz_of(node), g->iy_of(node)) == node);
}

TEST_CASE("derivatives are exact on linear fields") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 7, 2.0, 0.5);
  const auto gx = gradient(sample(g, [](const Point& p) { return p.x; }));
  const auto gy = gradient(sample(g, [](const Point& p) { return p.y; }));
  CHECK((gx.components[0].array() - 1.0).abs().maxCoeff() < 1e-13);
  CHECK(gx.components[1].cwiseAbs().maxCoeff() < 1e-13);
  CHECK((gy.components[1].array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient of e^{-y} cos x converges at second order") {
  std::vector<double> err;
  for (int n : {17, 33, 65}) {
    const auto g = build_grid(DomainSpec::interval(0, pi), n, n, 2.0);
    const auto grad = gradient(sample(g, [](const Point& p) { return std::exp(-p.y) * std::cos(p.x); }));
    double e = 0.0;
    for (int i = 0; i < g->size(); ++i) {
      const Point p = g->point(i);
      e = std::max(e, std::abs(grad.components[0][i] + std::exp(-p.y) * std::sin(p.x)));
      e = std::max(e, std::abs(grad.components[1][i] + std::exp(-p.y) * std::cos(p.x)));
    }
    err.push_back(e);
  }
  CHECK(std::log2(err[0] / err[1]) > 1.8);
  CHECK(std::log2(err[1] / err[2]) > 1.8);
}

TEST_CASE("bottom trace") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 5, 1.0);
  CHECK(trace_bottom(sample(g, [](const Point& p) { return p.y; })).cwiseAbs().maxCoeff() == 0.0);
  const auto tr = trace_bottom(sample(g, [](const Point& p) { return std::exp(-p.y) * std::cos(p.x); }));
  for (int i = 0; i < 9; ++i) CHECK(tr[i] == std::cos(g->x_nodes()[i]));
}

TEST_CASE("integration") {
  const auto g = build_grid(DomainSpec::interval(0, pi), 9, 5, 1.0);
  CHECK(integrate(Eigen::VectorXd::Ones(g->size()), Region::Bulk, *g) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(integrate(Eigen::VectorXd::Ones(9), Region::BottomBoundary, *g) == doctest::Approx(pi).epsilon(1e-12));
  // Two lateral faces of height 1.
  CHECK(integrate(Eigen::VectorXd::Ones(g->size()), Region::LateralBoundary, *g) == doctest::Approx(2.0));
  const auto r = build_grid(DomainSpec::rectangle(0, 1, 0, 2), 5, 4, 3.0);
  CHECK(integrate(Eigen::VectorXd::Ones(r->size()), Region::Bulk, *r) == doctest::Approx(6.0));
  CHECK(integrate(Eigen::VectorXd::Ones(r->size()), Region::LateralBoundary, *r) == doctest::Approx(18.0));

  std::vector<double> err;
  for (int n : {17, 33, 65}) {
    const auto gi = build_grid(DomainSpec::interval(0, 2 * pi), n, 3, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = std::pow(std::cos(gi->x_nodes()[i] + 0.3), 2);
    err.push_back(std::abs(integrate(v, Region::BottomBoundary, *gi) - pi) + 1e-300);
  }
  CHECK(err[2] < 1e-12);
}

TEST_CASE("y_weights integrate y^theta times linear data exactly") {
  for (double theta : {0.0, -0.5, 0.7}) {
    const auto g = build_grid(DomainSpec::interval(0, 1), 3, 9, 2.0, 0.7);
    const Eigen::VectorXd w = y_weights(*g, theta);
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < g->ny(); ++j) {
      s0 += w[j];
      s1 += w[j] * (1.0 + 3.0 * g->y_nodes()[j]);
    }
    const double m0 = std::pow(2.0, theta + 1) / (theta + 1), m1 = std::pow(2.0, theta + 2) / (theta + 2);
    CHECK(s0 == doctest::Approx(m0).epsilon(1e-12));
    CHECK(s1 == doctest::Approx(m0 + 3.0 * m1).epsilon(1e-12));
  }
}

TEST_CASE("csv output") {
  const auto g = build_grid(DomainSpec::interval(0, 1), 3, 3, 1.0);
  std::ostringstream os;
  write_csv(os, CylinderField(g, 2.0));
  const std::string s = os.str();
  CHECK(s.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 10);
}
