#include "generators.hpp"
#include "stablecyl/coefficients.hpp"
#include "stablecyl/errors.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace stablecyl;

TEST_CASE("eval_a on simple models") {
  CHECK(eval_a(CoefficientModel::power_weight(0.0), 2.0, 5.0) == 1.0);
  CHECK(eval_a(CoefficientModel::power_weight(0.5), 4.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_a(CoefficientModel::mean_curvature_weight(0.0), 1.0, 0.0) == 1.0);
  CHECK(eval_a(CoefficientModel::exp_y(), 1.0, 3.0) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(eval_a(CoefficientModel::constant_one(), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_a(CoefficientModel::constant_one(), 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(eval_a(CoefficientModel::exp_y(), 1000.0, 0.0), RangeError);
}

TEST_CASE("a_t agrees with centered differences") {
  gen::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const CoefficientModel m = gen::model(rng);
    const double y = gen::uniform(rng, 0.1, 4.0), t = gen::uniform(rng, 0.1, 5.0), h = 1e-6 * (1.0 + t);
    const double fd = (eval_a(m, y, t + h) - eval_a(m, y, t - h)) / (2.0 * h);
    CHECK(eval_a_t(m, y, t) == doctest::Approx(fd).epsilon(1e-6).scale(eval_a(m, y, t)));
  }
}

TEST_CASE("structural check") {
  const auto r = check_structural(CoefficientModel::power_weight(0.3), {0.1, 1.0, 10.0}, {0.0, 1.0, 10.0});
  CHECK(r.ellipticity_ok);
  CHECK(r.derivative_bound_C == 0.0);
  CHECK(check_structural(CoefficientModel::power_weight_p_laplace(0.0, 2.0)).ellipticity_ok);
  CHECK(check_structural(CoefficientModel::mean_curvature_weight(0.0)).ellipticity_ok);

  // a + t a_t = e^{-t^2}(1 - 2t^2) changes sign at t = 1/sqrt(2).
  const auto bad = CoefficientModel::custom([](double, double t) { return std::exp(-t * t); },
                                            [](double, double t) { return -2.0 * t * std::exp(-t * t); });
  const auto rb = check_structural(bad);
  CHECK_FALSE(rb.ellipticity_ok);
  REQUIRE(rb.witness);
  CHECK(rb.witness->second == doctest::Approx(1.0));
}

TEST_CASE("matrix_B special cases") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  const auto m = CoefficientModel::mean_curvature_weight(0.0);
  CHECK(matrix_B(m, 1.0, zero).entries.isApprox(Eigen::MatrixXd::Identity(3, 3)));
  Eigen::VectorXd eta(2);
  eta << 0.3, -2.0;
  CHECK(matrix_B(CoefficientModel::constant_one(), 2.0, eta).entries.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  const auto [along, across] = eigvals_B_closed_form(CoefficientModel::constant_one(), 1.0, eta);
  CHECK(along == 1.0);
  CHECK(across == 1.0);
  Eigen::VectorXd unit(2);
  unit << 0.6, 0.8;
  const auto pw = eigvals_B_closed_form(CoefficientModel::power_weight(0.5), 4.0, unit);
  CHECK(pw.first == doctest::Approx(2.0));
  CHECK(pw.second == doctest::Approx(2.0));
  CHECK_THROWS_AS(eigvals_B_closed_form(m, 1.0, zero), ArgumentError);
}

TEST_CASE("mean curvature B: eigenvector along eta") {
  // a = (1+t^2)^{-1/2}, a_t = -t (1+t^2)^{-3/2}; at t = 1: a + t a_t = 2^{-3/2}.
  Eigen::VectorXd eta(2);
  eta << 1.0, 0.0;
  const MatrixB B = matrix_B(CoefficientModel::mean_curvature_weight(0.0), 1.0, eta);
  CHECK(B.entries(0, 0) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  CHECK(B.entries(1, 1) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
  CHECK(std::abs(B.entries(0, 1)) < 1e-15);
}

TEST_CASE("property: closed-form B eigenvalues match a dense eigensolve") {
  gen::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const CoefficientModel m = gen::model(rng);
    const int dim = gen::integer(rng, 2, 3);
    const Eigen::VectorXd eta = gen::vector(rng, dim, 1e-3, 20.0);
    const double y = gen::uniform(rng, 0.05, 5.0);
    const MatrixB B = matrix_B(m, y, eta);
    CHECK((B.entries - B.entries.transpose()).norm() == 0.0);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B.entries).eigenvalues();
    const auto [along, across] = eigvals_B_closed_form(m, y, eta);
    // eta is an eigenvector with eigenvalue `along`.
    CHECK((B.entries * eta - along * eta).norm() <= 1e-12 * std::max(std::abs(along), across) * eta.norm());
    std::vector<double> expect(dim, across);
    expect[0] = along;
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < dim; ++k) CHECK(ev[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    // Ellipticity of the built-in models shows up as positive definiteness.
    CHECK(ev[0] > 0.0);
  }
}
