#include "stablecyl/config.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/report.hpp"
#include "stablecyl/verify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

using namespace stablecyl;

TEST_CASE("every preset round-trips through json and validates") {
  CHECK(presets().size() >= 10);
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    validate(p.config);
    const nlohmann::json j = config_to_json(p.config);
    CHECK(config_from_json(j) == p.config);
    CHECK(config_from_json(nlohmann::json::parse(j.dump())) == p.config);
    CHECK(&find_preset(p.name) == &p);
  }
  CHECK_THROWS_AS(find_preset("no-such-preset"), ArgumentError);
}

TEST_CASE("malformed configs are rejected") {
  nlohmann::json j = config_to_json(find_preset("grow-cos-stable").config);
  auto rejects = [](nlohmann::json bad) { CHECK_THROWS_AS(config_from_json(bad), ArgumentError); };
  {
    auto bad = j;
    bad["unexpected"] = 1;
    rejects(bad);
  }
  {
    auto bad = j;
    bad["experiment"] = "dance";
    rejects(bad);
  }
  {
    auto bad = j;
    bad["grid"]["nx"] = "many";
    rejects(bad);
  }
  {
    auto bad = j;
    bad["tolerances"]["newton"] = -1.0;
    rejects(bad);
  }
  {
    auto bad = j;
    bad["model"]["kind"] = "custom";
    rejects(bad);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ArgumentError);
}

TEST_CASE("load_config reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "stablecyl_config_test.json";
  const auto& cfg = find_preset("linear-y-stable").config;
  {
    std::ofstream os(path);
    os << config_to_json(cfg).dump(2);
  }
  CHECK(load_config(path.string()) == cfg);
  std::filesystem::remove(path);
}

TEST_CASE("enum names") {
  for (auto e : {Experiment::Solve, Experiment::Stability, Experiment::Poincare, Experiment::Spectral,
                 Experiment::ExtensionEquivalence, Experiment::Fractional, Experiment::Counterexample,
                 Experiment::VerifyAll})
    CHECK(experiment_from_string(to_string(e)) == e);
  for (auto s : {CheckStatus::Pass, CheckStatus::Fail, CheckStatus::NotApplicable})
    CHECK(check_status_from_string(to_string(s)) == s);
  CHECK(to_string(CheckStatus::NotApplicable) == "not-applicable");
}

TEST_CASE("model and reaction factories") {
  ModelConfig m;
  m.kind = CoefficientKind::PowerWeightPLaplace;
  m.theta = 0.3;
  m.p = 3.0;
  CHECK(eval_a(make_model(m), 2.0, 0.0) == doctest::Approx(std::pow(2.0, 0.3)));
  ReactionConfig r;
  r.kind = ReactionKind::Polynomial;
  r.params = {1.0, 0.0, 2.0};
  CHECK(make_reaction(r).f(2.0) == doctest::Approx(9.0));
  r.kind = ReactionKind::Linear;
  r.params = {-3.0};
  CHECK(make_reaction(r).f_prime(5.0) == doctest::Approx(-3.0));
}

TEST_CASE("report serialization") {
  RunReport rep;
  rep.experiment = "unit";
  rep.add({"a", CheckStatus::Pass, 1e-13, 1e-12, "", 0.5, {}});
  rep.add({"b", CheckStatus::NotApplicable, std::numeric_limits<double>::infinity(), 1.0, "x", 0.1, {}});
  CHECK(rep.passed());
  CHECK(rep.checks[0].anchor == "plumbing");
  const nlohmann::json j = rep;
  CHECK(j["checks"][1]["measured"] == "inf");
  const RunReport back = j.get<RunReport>();
  CHECK(back.checks.size() == 2);
  CHECK(std::isinf(back.checks[1].measured));
  CHECK(back.checks[1].status == CheckStatus::NotApplicable);
  CHECK(dump_report(rep, false).find("seconds") == std::string::npos);
  CHECK(dump_report(rep, true).find("seconds") != std::string::npos);
  rep.add({"c", CheckStatus::Fail, 1.0, 0.0, "y", 0.0, {}});
  CHECK(!rep.passed());
}

TEST_CASE("solve preset runs end to end") {
  auto cfg = find_preset("linear-y-stable").config;
  cfg.grid.nx = 9;
  cfg.grid.ny = 9;
  const RunReport rep = run_experiment(cfg, false);
  CHECK(rep.passed());
  CHECK(!rep.checks.empty());
}

TEST_CASE("acceptance table") {
  const auto& checks = acceptance_checks();
  REQUIRE(checks.size() == 11);
  for (size_t i = 0; i < checks.size(); ++i) {
    CHECK(checks[i].id == int(i) + 1);
    CHECK(checks[i].time_limit > 0.0);
    CHECK(!checks[i].anchor.empty());
  }
  const auto rec = run_check(checks[0]);
  CHECK(rec.status == CheckStatus::Pass);
}
