#include "stablecyl/verify.hpp"

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/fractional1d.hpp"
#include "stablecyl/geometry.hpp"
#include "stablecyl/solver.hpp"
#include "stablecyl/spectral.hpp"
#include "stablecyl/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <random>

namespace stablecyl {

namespace {

constexpr double kPi = std::numbers::pi;

CheckRecord record(const std::string& name, bool pass, double measured, double tolerance,
                   nlohmann::json details = nlohmann::json::object()) {
  CheckRecord r;
  r.name = name;
  r.status = pass ? CheckStatus::Pass : CheckStatus::Fail;
  r.measured = measured;
  r.tolerance = tolerance;
  r.details = std::move(details);
  return r;
}

CoefficientModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> theta(-0.9, 0.9), p(1.2, 4.0);
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return CoefficientModel::power_weight(theta(rng));
    case 1: return CoefficientModel::power_weight_p_laplace(theta(rng), p(rng));
    case 2: return CoefficientModel::mean_curvature_weight(theta(rng));
    case 3: return CoefficientModel::constant_one();
    default: return CoefficientModel::exp_y();
  }
}

// Least-squares slope of log r against log h.
double fitted_order(const std::vector<double>& h, const std::vector<double>& r) {
  const int m = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const double x = std::log(h[i]), y = std::log(r[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<int> stable_catalog() { return {static_cast<int>(CatalogName::LinearY), static_cast<int>(CatalogName::ExpDecay), static_cast<int>(CatalogName::GrowCos)}; }

}  // namespace

CheckRecord check_b_spectrum() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ys(0.05, 5.0), log_norm(std::log(1e-2), std::log(10.0)), comp(-1.0, 1.0);
  double worst = 0.0;
  for (int sample = 0; sample < 200; ++sample) {
    const CoefficientModel model = random_model(rng);
    const int dim = 2 + sample % 2;
    Eigen::VectorXd eta(dim);
    for (int i = 0; i < dim; ++i) eta[i] = comp(rng);
    if (eta.norm() == 0.0) eta[0] = 1.0;
    eta *= std::exp(log_norm(rng)) / eta.norm();
    const double y = ys(rng);
    const MatrixB B = matrix_B(model, y, eta);
    Eigen::VectorXd numeric = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B.entries, Eigen::EigenvaluesOnly).eigenvalues();
    const auto [along, across] = eigvals_B_closed_form(model, y, eta);
    Eigen::VectorXd closed = Eigen::VectorXd::Constant(dim, across);
    closed[0] = along;
    std::sort(closed.begin(), closed.end());
    const double scale = closed.cwiseAbs().maxCoeff();
    worst = std::max(worst, (numeric - closed).cwiseAbs().maxCoeff() / scale);
  }
  return record("b_spectrum", worst <= 1e-12, worst, 1e-12, {{"samples", 200}});
}

CheckRecord check_catalog_convergence() {
  struct Case {
    std::string label;
    CatalogName name;
    CatalogParams params;
  };
  CatalogParams family;
  family.c = 1.0;
  family.model = CoefficientModel::custom([](double y, double) { return 1.0 + y; }, [](double, double) { return 0.0; },
                                          "1+y");
  const std::vector<Case> cases = {{"decay_cos", CatalogName::DecayCos, {}},
                                   {"grow_cos", CatalogName::GrowCos, {}},
                                   {"linear_y", CatalogName::LinearY, {}},
                                   {"exp_decay", CatalogName::ExpDecay, {}},
                                   {"one_dim_family", CatalogName::OneDimFamily, family}};
  const double Y = 2.0;
  const DomainSpec dom = DomainSpec::interval(0.0, 2.0 * kPi);
  constexpr double floor = 1e-11;

  nlohmann::json details = nlohmann::json::object();
  double worst_order = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (const auto& c : cases) {
    const CatalogProblem prob = catalog_problem(c.name, c.params);
    std::vector<double> hs, rs;
    for (int N : {17, 33, 65}) {
      const GridPtr grid = build_grid(dom, N, N, Y);
      const CylinderField u = catalog_solution(c.name, c.params, grid);
      double r = 0.0;
      for (int m = 0; m <= 2; ++m) {
        const CylinderField phi = sample(grid, [&](const Point& p) { return std::cos(m * p.x) * std::pow(1.0 - p.y / Y, 2); });
        r = std::max(r, std::abs(residual_weak(u, prob.model, prob.reaction, phi)));
      }
      hs.push_back(grid->max_spacing());
      rs.push_back(r);
    }
    const bool exact = *std::max_element(rs.begin(), rs.end()) <= floor;
    const double order = exact ? std::numeric_limits<double>::infinity() : fitted_order(hs, rs);
    if (!exact) worst_order = std::min(worst_order, order);
    pass = pass && (exact || order >= 1.9);
    details[c.label] = {{"residuals", rs}, {"order", exact ? nlohmann::json("exact") : nlohmann::json(order)}};
  }
  return record("catalog_convergence", pass, worst_order, 1.9, details);
}

CheckRecord check_stability_labels() {
  const DomainSpec dom = DomainSpec::interval(0.0, kPi);
  const GridPtr grid = build_grid(dom, 65, 65, 8.0);
  nlohmann::json details = nlohmann::json::object();
  bool pass = true;
  double unstable_mu = 0.0;
  for (int k : stable_catalog()) {
    const auto name = static_cast<CatalogName>(k);
    const CatalogProblem prob = catalog_problem(name);
    const StabilityReport rep = classify(catalog_solution(name, {}, grid), prob.model, prob.reaction);
    details[to_string(name)] = {{"mu1", rep.mu1}, {"classification", to_string(rep.classification)}};
    pass = pass && rep.classification == Classification::Stable;
  }
  {
    const CatalogProblem prob = catalog_problem(CatalogName::DecayCos);
    const StabilityReport rep = classify(catalog_solution(CatalogName::DecayCos, {}, grid), prob.model, prob.reaction);
    unstable_mu = rep.mu1;
    details["DecayCos"] = {{"mu1", rep.mu1}, {"classification", to_string(rep.classification)}};
    pass = pass && rep.classification == Classification::Unstable && rep.mu1 < -1e-3;
  }
  return record("stability_labels", pass, unstable_mu, -1e-3, details);
}

CheckRecord check_poincare() {
  const DomainSpec dom = DomainSpec::interval(0.0, kPi);
  const double Y = 8.0;
  std::vector<std::pair<std::string, std::function<CylinderField(const GridPtr&)>>> psis;
  psis.emplace_back("log_cutoff_1e4", [](const GridPtr& g) { return log_cutoff(1e4, g); });
  for (int m = 0; m <= 2; ++m) {
    psis.emplace_back("cos" + std::to_string(m), [m, Y](const GridPtr& g) {
      return sample(g, [&](const Point& p) { return std::cos(m * p.x) * std::cos(0.5 * kPi * p.y / Y); });
    });
  }
  const GridPtr coarse = build_grid(dom, 33, 33, Y), fine = build_grid(dom, 65, 65, Y);
  const double hc = coarse->max_spacing(), hf = fine->max_spacing();

  auto gaps = [&](CatalogName name, const GridPtr& grid) {
    const CatalogProblem prob = catalog_problem(name);
    const CylinderField u = catalog_solution(name, {}, grid);
    std::vector<PoincareSides> out;
    for (const auto& [label, make] : psis) out.push_back(poincare_sides(u, prob.model, prob.reaction, make(grid)));
    return out;
  };

  nlohmann::json details = nlohmann::json::object();
  bool pass = true;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (int k : stable_catalog()) {
    const auto name = static_cast<CatalogName>(k);
    const auto gc = gaps(name, coarse), gf = gaps(name, fine);
    nlohmann::json per = nlohmann::json::object();
    for (size_t i = 0; i < psis.size(); ++i) {
      const double C = std::abs(gc[i].gap() - gf[i].gap()) / (0.75 * hc * hc);
      const double margin = gf[i].gap() - (C * hf * hf + 1e-12);
      worst_margin = std::max(worst_margin, margin);
      pass = pass && margin <= 0.0;
      per[psis[i].first] = {{"sides", gf[i]}, {"C", C}, {"gap", gf[i].gap()}};
    }
    details[to_string(name)] = per;
  }

  // Informational: a violation on the unstable solution.
  const auto gc = gaps(CatalogName::DecayCos, coarse), gf = gaps(CatalogName::DecayCos, fine);
  nlohmann::json witness = nullptr;
  for (size_t i = 0; i < psis.size(); ++i) {
    const double C = std::abs(gc[i].gap() - gf[i].gap()) / (0.75 * hc * hc);
    if (gf[i].gap() > 10.0 * C * hf * hf) {
      witness = {{"psi", psis[i].first}, {"gap", gf[i].gap()}, {"C", C}};
      break;
    }
  }
  details["unstable_witness"] = witness;
  return record("poincare", pass, worst_margin, 0.0, details);
}

CheckRecord check_weight_decomposition() {
  const DomainSpec dom = DomainSpec::rectangle(0.0, kPi, 0.0, kPi);
  const std::vector<CoefficientModel> models = {CoefficientModel::constant_one(), CoefficientModel::mean_curvature_weight(0.0)};
  nlohmann::json details = nlohmann::json::object();
  bool pass = true;
  double worst_ratio = 0.0;
  for (const auto& model : models) {
    std::vector<double> errs, hs;
    double min_bracket = std::numeric_limits<double>::infinity();
    for (int N : {33, 65}) {
      const GridPtr grid = build_grid(dom, N, 9, 2.0);
      const CylinderField u = sample(grid, [](const Point& p) { return std::exp(-p.y) * std::cos(p.x) * std::cos(p.z); });
      const int iy = 4;
      const LevelSetGeometry geo = level_set_weights(u, iy, 1e-12);
      const double threshold = 0.2 * geo.speed.maxCoeff();
      const WeightDecomposition w = weight_decomposition(u, model, iy, threshold);
      double err = 0.0;
      for (size_t i = 0; i < w.mask.size(); ++i) {
        if (!w.mask[i]) continue;
        err = std::max(err, std::abs(w.bracket[i] - w.decomposed[i]));
        min_bracket = std::min(min_bracket, w.bracket[i]);
      }
      errs.push_back(err);
      hs.push_back(kPi / (N - 1));
    }
    const double C = errs[0] / hs[0];
    const double ratio = errs[1] / (C * hs[1] + 1e-12);
    worst_ratio = std::max(worst_ratio, ratio);
    pass = pass && ratio <= 1.0 && min_bracket >= -1e-8;
    details[model.label()] = {{"errors", errs}, {"C", C}, {"min_bracket", min_bracket}};
  }
  return record("weight_decomposition", pass, worst_ratio, 1.0, details);
}

CheckRecord check_nonlocal_constancy() {
  struct Setup {
    std::string label;
    DomainSpec domain;
    int K, nodes;
  };
  const std::vector<Setup> setups = {{"interval", DomainSpec::interval(0.0, kPi), 32, 129},
                                     {"rectangle", DomainSpec::rectangle(0.0, kPi, 0.0, kPi), 64, 33}};
  const std::vector<std::pair<std::string, ReactionSpec>> reactions = {
      {"-v^3", ReactionSpec::cubic()}, {"-v-v^3", ReactionSpec::polynomial({0.0, -1.0, 0.0, -1.0})}};
  nlohmann::json details = nlohmann::json::object();
  double worst = 0.0;
  bool pass = true;
  for (const auto& setup : setups) {
    const BasisPtr basis = neumann_basis(setup.domain, setup.K, setup.nodes);
    for (const auto& [rlabel, reaction] : reactions) {
      int converged = 0;
      double energy = 0.0;
      for (int run = 0; run < 20; ++run) {
        std::mt19937_64 rng(1000 + run);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd c(setup.K);
        for (int k = 0; k < setup.K; ++k) c[k] = normal(rng) / (1.0 + k);
        try {
          const SemilinearReport rep = solve_semilinear(basis, 0.5, reaction, {basis, c}, 1e-12, 200);
          ++converged;
          energy = std::max(energy, rep.v.nonconstant_energy());
        } catch (const SolverError&) {
          pass = false;
        }
      }
      worst = std::max(worst, energy);
      pass = pass && converged == 20 && energy <= 1e-12;
      details[setup.label + " " + rlabel] = {{"converged", converged}, {"max_nonconstant_energy", energy}};
    }
  }
  return record("nonlocal_constancy", pass, worst, 1e-12, details);
}

CheckRecord check_extension_equivalence() {
  const DomainSpec dom = DomainSpec::interval(0.0, kPi);
  const BasisPtr basis = neumann_basis(dom, 32, 129);
  const double Y = 20.0;
  const GridPtr grid = build_grid(dom, 129, 65, Y);
  const std::vector<std::pair<std::string, ReactionSpec>> reactions = {{"f=0", ReactionSpec::constant(0.0)},
                                                                       {"f=1-v", ReactionSpec::polynomial({1.0, -1.0})},
                                                                       {"f=-v^3", ReactionSpec::cubic()}};
  nlohmann::json details = {{"y_max", Y}, {"tail", std::exp(-std::sqrt(basis->lambda(1)) * Y)}};
  double worst = 0.0;
  for (const auto& [label, reaction] : reactions) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 0.3);
    Eigen::VectorXd c(basis->K());
    for (int k = 0; k < basis->K(); ++k) c[k] = normal(rng) / (1.0 + k);
    const SpectralFunction init{basis, c};
    const double d = extension_equivalence(basis, reaction, grid, 1e-12, &init);
    details[label] = d;
    worst = std::max(worst, d);
  }
  return record("extension_equivalence", worst <= 1e-6, worst, 1e-6, details);
}

CheckRecord check_eigenvalue_growth() {
  const GrowthReport rect = eig_growth_check(*neumann_basis(DomainSpec::rectangle(0.0, kPi, 0.0, kPi), 500, 33), 0.9);
  const GrowthReport line = eig_growth_check(*neumann_basis(DomainSpec::interval(0.0, kPi), 500, 33), 1.8);
  const bool pass = rect.K_beta <= 50 && std::abs(line.C2) <= 0.05;
  return record("eigenvalue_growth", pass, rect.K_beta, 50,
                {{"rectangle", {{"K_beta", rect.K_beta}, {"C1", rect.C1}, {"C2", rect.C2}}},
                 {"interval", {{"K_beta", line.K_beta}, {"C1", line.C1}, {"C2", line.C2}}}});
}

CheckRecord check_operator_distinctness() {
  auto bump = [](double x) {
    const double r = x - 0.5 * kPi;
    return std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
  };
  std::vector<double> d;
  for (auto [K, nodes] : {std::pair{64, 257}, std::pair{128, 513}}) {
    const BasisPtr basis = neumann_basis(DomainSpec::interval(0.0, kPi), K, nodes);
    Eigen::VectorXd vals(basis->omega_size());
    for (int i = 0; i < vals.size(); ++i) vals[i] = bump(kPi * i / (nodes - 1));
    d.push_back(compare_operators(project(basis, vals), 0.5, true));
  }
  const double lo = std::min(d[0], d[1]);
  const bool stable = std::abs(d[0] - d[1]) <= 0.1 * std::max(d[0], d[1]);
  return record("operator_distinctness", lo > 0.01 && stable, lo, 0.01, {{"discrepancies", d}, {"stable", stable}});
}

CheckRecord check_counterexample() {
  const CounterexampleOptions opt;
  const ProfileFn zero = [](double) { return Profile{0.0, 0.0, 0.0}; };
  const double lo = opt.epsilon / 11.0, hi = 4.0 * opt.epsilon / 11.0;
  try {
    const CounterexampleResult r = construct_counterexample(zero, opt);
    const double nd = std::max(std::abs(r.normal_derivative_left), std::abs(r.normal_derivative_right));
    const bool pass = r.delta1 >= lo && r.delta1 <= hi && r.delta2 >= lo && r.delta2 <= hi &&
                      r.interior_residual <= 1e-8 && nd <= 1e-4;
    nlohmann::json j = r;
    j["max_normal_derivative"] = nd;
    return record("counterexample", pass, r.interior_residual, 1e-8, j);
  } catch (const NoRootError& e) {
    return record("counterexample", false, e.residual(), 1.0, {{"no_root", e.what()}, {"band_residual", e.residual()}});
  }
}

CheckRecord check_extremum_sign() {
  struct Preset {
    std::string label;
    CoefficientModel model;
    ReactionSpec reaction;
    double offset;
  };
  const std::vector<Preset> presets = {
      {"constant-one f=1-u", CoefficientModel::constant_one(), ReactionSpec::polynomial({1.0, -1.0}), 1.0},
      {"mean-curvature f=-u-u^3", CoefficientModel::mean_curvature_weight(0.0),
       ReactionSpec::polynomial({0.0, -1.0, 0.0, -1.0}), 0.0}};
  const GridPtr grid = build_grid(DomainSpec::interval(0.0, kPi), 17, 17, 4.0);
  nlohmann::json details = nlohmann::json::object();
  bool pass = true;
  int applicable = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : presets) {
    if (!minimum_principle_hypotheses(p.model, p.reaction)) {
      details[p.label] = "hypotheses not met";
      continue;
    }
    // Smooth random start: rough nodal noise saturates the mean-curvature flux.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> amp(-0.3, 0.3);
    std::array<double, 4> a{};
    for (double& c : a) c = amp(rng);
    const CylinderField init = sample(grid, [&](const Point& q) {
      double v = p.offset;
      for (int m = 0; m < 4; ++m) v += a[m] / (1.0 + m) * std::cos(m * q.x) * std::exp(-0.5 * q.y);
      return v;
    });
    const SolveReport sol = solve_newton(p.model, p.reaction, grid, init, 1e-10, 50);
    if (!sol.converged) {
      details[p.label] = {{"converged", false}};
      pass = false;
      continue;
    }
    const StabilityReport st = classify(sol.u, p.model, p.reaction);
    if (st.classification != Classification::Stable) {
      details[p.label] = {{"classification", to_string(st.classification)}};
      continue;
    }
    ++applicable;
    const ExtremumReport ext = extremum_details(sol.u, p.reaction);
    worst = std::max(worst, ext.f_c);
    pass = pass && ext.holds();
    details[p.label] = {{"c", ext.c}, {"bottom_min", ext.bottom_min}, {"f_c", ext.f_c}, {"holds", ext.holds()}};
  }
  return record("extremum_sign", pass && applicable > 0, worst, 1e-8, details);
}

const std::vector<AcceptanceCheck>& acceptance_checks() {
  static const std::vector<AcceptanceCheck> checks = {
      {1, "b_spectrum", "eigenvalues of the linearized coefficient matrix B", 1.0, check_b_spectrum},
      {2, "catalog_convergence", "explicit catalog solutions and the one-dimensional family", 30.0,
       check_catalog_convergence},
      {3, "stability_labels", "stability of the catalog solutions", 60.0, check_stability_labels},
      {4, "poincare", "geometric Poincare inequality for stable solutions", 60.0, check_poincare},
      {5, "weight_decomposition", "curvature decomposition of the Poincare weight", 30.0, check_weight_decomposition},
      {6, "nonlocal_constancy", "constancy of stable solutions to the spectral Neumann problem", 60.0,
       check_nonlocal_constancy},
      {7, "extension_equivalence", "harmonic extension of the half spectral Neumann Laplacian", 30.0,
       check_extension_equivalence},
      {8, "eigenvalue_growth", "polynomial growth of Neumann eigenvalues", 10.0, check_eigenvalue_growth},
      {9, "operator_distinctness", "spectral and integral fractional Laplacians differ", 30.0,
       check_operator_distinctness},
      {10, "counterexample", "locally s-harmonic approximation counterexample", 120.0, check_counterexample},
      {11, "extremum_sign", "sign of the reaction at the infimum of stable solutions", 30.0, check_extremum_sign},
  };
  return checks;
}

CheckRecord run_check(const AcceptanceCheck& check) {
  const auto start = std::chrono::steady_clock::now();
  CheckRecord r;
  try {
    r = check.run();
  } catch (const std::exception& e) {
    r = record(check.name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, {{"error", e.what()}});
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.name = check.name;
  r.anchor = check.anchor;
  r.details["time_limit"] = check.time_limit;
  if (r.seconds > check.time_limit) {
    r.status = CheckStatus::Fail;
    r.details["time_limit_exceeded"] = true;
  }
  return r;
}

RunReport verify_all(bool parallel, int threads, const std::string& out_dir) {
  const auto& checks = acceptance_checks();
  std::vector<CheckRecord> results(checks.size());
  if (parallel && threads > 1) {
    for (size_t first = 0; first < checks.size(); first += threads) {
      std::vector<std::future<CheckRecord>> batch;
      for (size_t i = first; i < std::min(checks.size(), first + threads); ++i)
        batch.push_back(std::async(std::launch::async, [&checks, i] { return run_check(checks[i]); }));
      for (size_t i = 0; i < batch.size(); ++i) results[first + i] = batch[i].get();
    }
  } else {
    for (size_t i = 0; i < checks.size(); ++i) results[i] = run_check(checks[i]);
  }

  RunReport report;
  report.experiment = "VerifyAll";
  for (auto& r : results) report.add(std::move(r));
  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    for (const auto& r : report.checks) {
      const fs::path dir = fs::path(out_dir) / r.name;
      fs::create_directories(dir);
      std::ofstream(dir / "record.json") << nlohmann::json(r).dump(2) << '\n';
    }
    write_report((fs::path(out_dir) / "report.json").string(), report);
  }
  return report;
}

}  // namespace stablecyl
