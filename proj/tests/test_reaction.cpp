#include "generators.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/reaction.hpp"

#include <doctest.h>

using namespace stablecyl;

TEST_CASE("reaction factories") {
  CHECK(ReactionSpec::linear(2.0).f(3.0) == 6.0);
  CHECK(ReactionSpec::constant(-1.0).f(7.0) == -1.0);
  CHECK(ReactionSpec::constant(-1.0).f_prime(7.0) == 0.0);
  CHECK(ReactionSpec::cubic().f(2.0) == -8.0);
  CHECK(ReactionSpec::polynomial({1.0, -1.0}).f(1.0) == 0.0);
  CHECK(ReactionSpec::exponential().convexity == Convexity::StrictlyConvex);
  CHECK(ReactionSpec::exponential(-1.0, 1.0).convexity == Convexity::StrictlyConcave);
  CHECK(ReactionSpec::linear(1.0).g_zero);
  auto r = ReactionSpec::linear(1.0).with_bulk([](double, double u) { return u; }, [](double, double) { return 1.0; });
  CHECK_FALSE(r.g_zero);
  CHECK(convexity_from_string(to_string(Convexity::StrictlyConcave)) == Convexity::StrictlyConcave);
  CHECK_THROWS_AS(convexity_from_string("wobbly"), ArgumentError);
}

TEST_CASE("property: derivatives agree with centered differences") {
  gen::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> c(4);
    for (double& v : c) v = gen::uniform(rng, -2, 2);
    const std::vector<ReactionSpec> specs = {
        ReactionSpec::polynomial(c), ReactionSpec::exponential(gen::uniform(rng, -2, 2), gen::uniform(rng, -1, 1)),
        ReactionSpec::custom([](double u) { return std::sin(u); })};
    for (const auto& r : specs) {
      const double u = gen::uniform(rng, -2, 2), h = 1e-5;
      CHECK(r.f_prime(u) == doctest::Approx((r.f(u + h) - r.f(u - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
      CHECK(r.f_second(u) ==
            doctest::Approx((r.f_prime(u + h) - r.f_prime(u - h)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
  }
}
