#include "generators.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/fractional1d.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <numbers>

using namespace stablecyl;
constexpr double pi = std::numbers::pi;

namespace {

// Normalized fractional Laplacian of e^{-x^2} through its Fourier transform.
double gaussian_fraclap(double s, double x) {
  auto f = [&](double xi) { return std::pow(xi, 2 * s) * std::exp(-xi * xi / 4) * std::cos(xi * x); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 40.0, 15, 1e-14) / std::sqrt(pi);
}

Eigen::VectorXd nodal(const Fractional1DOperator& op, const std::function<double(double)>& fn) {
  Eigen::VectorXd v(op.size());
  for (int i = 0; i < op.size(); ++i) v[i] = fn(op.nodes()[i]);
  return v;
}

}  // namespace

TEST_CASE("normalizing constant") {
  CHECK(fractional_constant(0.5) == doctest::Approx(1.0 / pi));
  for (double s : {0.2, 0.7})
    CHECK(fractional_constant(s) == doctest::Approx(s * std::pow(4.0, s) * std::tgamma(0.5 + s) /
                                                    (std::sqrt(pi) * std::tgamma(1 - s))));
}

TEST_CASE("gaussian against the Fourier oracle") {
  CHECK(gaussian_fraclap(0.5, 0.0) == doctest::Approx(2.0 * std::tgamma(1.0) / std::sqrt(pi)));
  for (double s : {0.3, 0.5}) {
    const auto op = Fractional1DOperator::uniform(s, 8.0, 0.01);
    const Eigen::VectorXd v = nodal(op, [](double x) { return std::exp(-x * x); });
    for (double x : {0.0, 0.5, 1.3}) {
      const double got = fractional_constant(s) * apply_integral_fraclap(op, v, x);
      CHECK(got == doctest::Approx(gaussian_fraclap(s, x)).epsilon(2e-3).scale(1.0));
    }
  }
  // For s > 1/2 the error decays like h^{2-2s}.
  std::vector<double> err;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto op = Fractional1DOperator::uniform(0.75, 8.0, h);
    const Eigen::VectorXd v = nodal(op, [](double x) { return std::exp(-x * x); });
    err.push_back(std::abs(fractional_constant(0.75) * apply_integral_fraclap(op, v, 0.0) - gaussian_fraclap(0.75, 0.0)));
  }
  CHECK(err[2] < 5e-3);
  CHECK(err[0] / err[1] > 1.3);
  CHECK(err[1] / err[2] > 1.3);
}

TEST_CASE("half-power bump has constant fractional Laplacian") {
  const auto op = Fractional1DOperator::uniform(0.5, 1.5, 1e-3);
  const Eigen::VectorXd v = nodal(op, [](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); });
  for (double x : {0.0, 0.3, -0.6, 0.9})
    CHECK(fractional_constant(0.5) * apply_integral_fraclap(op, v, x) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("property: rows are M-matrix rows") {
  gen::Rng rng(53);
  for (int t = 0; t < 6; ++t) {
    const double s = gen::uniform(rng, 0.1, 0.9);
    const auto op = Fractional1DOperator::graded(s, 1.0, 0.05, gen::uniform(rng, 4.0, 16.0));
    for (int k = 0; k < 5; ++k) {
      int i;
      do i = gen::integer(rng, 1, op.size() - 2);
      while (!op.is_target(i));
      const Eigen::VectorXd r = op.row(i);
      CHECK(r[i] > 0.0);
      for (int j = 0; j < op.size(); ++j)
        if (j != i) CHECK(r[j] <= 0.0);
      CHECK(r.sum() > 0.0);
    }
    CHECK_THROWS_AS(op.row(0), DomainError);
  }
}

TEST_CASE("graded mesh layout") {
  const auto op = Fractional1DOperator::graded(0.5, 2.0, 0.1, 20.0);
  CHECK(op.M_left() == doctest::Approx(-20.0));
  CHECK(op.M_right() == doctest::Approx(20.0));
  CHECK(op.find_node(0.0) >= 0);
  CHECK(op.find_node(1.5) >= 0);
  CHECK(op.find_node(0.05) == -1);
  for (int i = 1; i < op.size(); ++i) CHECK(op.nodes()[i] > op.nodes()[i - 1]);
  CHECK(op.nodes()[op.size() - 1] - op.nodes()[op.size() - 2] > 0.1);
}

TEST_CASE("fractional normal derivative") {
  auto root = [](double x) { return std::sqrt(std::max(0.0, 1.0 - x)); };
  CHECK(fractional_normal_derivative(root, 0.5, 1.0, Side::FromLeftInterval, 0.1) == doctest::Approx(1.0));
  auto mirrored = [](double x) { return 3.0 * std::sqrt(std::max(0.0, x + 1.0)); };
  CHECK(fractional_normal_derivative(mirrored, 0.5, -1.0, Side::FromRightInterval, 0.1) == doctest::Approx(3.0));
  auto flat = [](double x) { return std::cos(x); };
  CHECK(std::abs(fractional_normal_derivative(flat, 0.5, 0.0, Side::FromLeftInterval, 0.1)) < 1e-4);
  CHECK(to_string(Side::FromLeftInterval) != to_string(Side::FromRightInterval));
  CHECK_THROWS_AS(fractional_normal_derivative(flat, 1.0, 0.0, Side::FromLeftInterval, 0.1), ArgumentError);
}

TEST_CASE("cubic interpolation is exact on cubics") {
  std::vector<double> nodes;
  for (int i = 0; i <= 20; ++i) nodes.push_back(-1.0 + 0.1 * i + 0.01 * (i % 3));
  auto p = [](double x) { return 1 - 2 * x + 0.5 * x * x - x * x * x; };
  Eigen::VectorXd v(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) v[i] = p(nodes[i]);
  for (double x : {-0.95, -0.3, 0.17, 0.9}) {
    CHECK(interpolate_cubic(nodes, v, x) == doctest::Approx(p(x)).epsilon(1e-12));
    CHECK(interpolate_cubic_derivative(nodes, v, x) == doctest::Approx(-2 + x - 3 * x * x).epsilon(1e-10));
  }
}

TEST_CASE("exterior value problem") {
  const auto op = Fractional1DOperator::graded(0.5, 1.5, 0.05, 16.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(op.size());
  CHECK(solve_exterior_value(op, zero, -1.0, 1.0).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd data = nodal(op, [](double x) { return std::abs(x) >= 1.0 ? std::exp(-std::abs(x)) : 0.0; });
  const Eigen::VectorXd v = solve_exterior_value(op, data, -1.0, 1.0);
  for (int i = 0; i < op.size(); ++i) {
    const double x = op.nodes()[i];
    if (std::abs(x) < 1.0) {
      CHECK(v[i] > 0.0);
      CHECK(v[i] <= std::exp(-1.0));
      CHECK(std::abs(apply_integral_fraclap(op, v, x)) < 1e-9);
    } else {
      CHECK(v[i] == data[i]);
    }
  }
  CHECK_THROWS_AS(solve_exterior_value(op, zero, 1.0, -1.0), ArgumentError);
}

TEST_CASE("target profile") {
  const ProfileFn h = [](double x) { return Profile{std::sin(x), std::cos(x), -std::sin(x)}; };
  const double e = 0.5;
  CHECK(target_profile(h, e, 0.4).value == doctest::Approx(std::sin(0.4)));
  const double band = 1 + 1.5 * e / 11;
  CHECK(target_profile(h, e, band).value == doctest::Approx(2 * band));
  CHECK(target_profile(h, e, band).d1 == doctest::Approx(2.0));
  CHECK(target_profile(h, e, -(1 + 3.5 * e / 11)).value == doctest::Approx(2 * (1 + 3.5 * e / 11)));
  CHECK(target_profile(h, e, 1 + 6 * e / 11).value == 0.0);
  gen::Rng rng(59);
  for (int t = 0; t < 50; ++t) {
    const double x = gen::uniform(rng, -1.5, 1.5), d = 1e-6;
    const Profile p = target_profile(h, e, x), pl = target_profile(h, e, x - d), pr = target_profile(h, e, x + d);
    CHECK((pr.value - pl.value) / (2 * d) == doctest::Approx(p.d1).epsilon(1e-5).scale(1.0));
    CHECK((pr.d1 - pl.d1) / (2 * d) == doctest::Approx(p.d2).epsilon(1e-4).scale(100.0));
  }
}

TEST_CASE("small counterexample fit reports its residuals") {
  const ProfileFn h = [](double x) { return Profile{x, 1.0, 0.0}; };
  CounterexampleOptions opt;
  opt.fit_nodes = 201;
  opt.M_max = 8.0;
  try {
    const auto r = construct_counterexample(h, opt);
    CHECK(std::isfinite(r.c2_residual));
    CHECK(r.delta1 > 0.0);
    CHECK(r.delta2 > 0.0);
    CHECK(!r.history.empty());
    const nlohmann::json j = r;
    CHECK(j.contains("c2_residual"));
  } catch (const NoRootError& err) {
    CHECK(err.residual() > 0.0);
  }
}

TEST_CASE("spectral and integral operators differ") {
  const auto b = neumann_basis(DomainSpec::interval(0, pi), 32, 129);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(32);
  c[0] = 1.0;
  CHECK(compare_operators(SpectralFunction{b, c}, 0.5, true) > 0.01);
}
