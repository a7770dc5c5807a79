#include "stablecyl/config.hpp"

#include "stablecyl/errors.hpp"
#include "stablecyl/fractional1d.hpp"
#include "stablecyl/geometry.hpp"
#include "stablecyl/spectral.hpp"
#include "stablecyl/stability.hpp"
#include "stablecyl/verify.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

namespace stablecyl {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

const std::vector<Experiment> kExperiments = {Experiment::Solve,     Experiment::Stability,
                                              Experiment::Poincare,  Experiment::Spectral,
                                              Experiment::ExtensionEquivalence, Experiment::Fractional,
                                              Experiment::Counterexample, Experiment::VerifyAll};

template <class E>
E enum_from(const std::string& name, const std::vector<E>& all, const std::string& what) {
  for (E e : all)
    if (to_string(e) == name) return e;
  throw ArgumentError("unknown " + what + " '" + name + "'");
}

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ArgumentError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Solve: return "Solve";
    case Experiment::Stability: return "Stability";
    case Experiment::Poincare: return "Poincare";
    case Experiment::Spectral: return "Spectral";
    case Experiment::ExtensionEquivalence: return "ExtensionEquivalence";
    case Experiment::Fractional: return "Fractional";
    case Experiment::Counterexample: return "Counterexample";
    case Experiment::VerifyAll: return "VerifyAll";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& name) { return enum_from(name, kExperiments, "experiment"); }

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["domain"] = {{"kind", to_string(c.domain.kind)}, {"x", {c.domain.x_min, c.domain.x_max}}};
  if (c.domain.kind == DomainSpec::Kind::Rectangle) j["domain"]["z"] = {c.domain.z_min, c.domain.z_max};
  j["grid"] = {{"nx", c.grid.nx},
               {"ny", c.grid.ny},
               {"y_max", c.grid.y_max},
               {"grading", c.grid.grading},
               {"top", to_string(c.grid.top)}};
  j["model"] = {{"kind", to_string(c.model.kind)}, {"theta", c.model.theta}, {"p", c.model.p}};
  j["reaction"] = {{"kind", to_string(c.reaction.kind)},
                   {"params", c.reaction.params},
                   {"convexity", to_string(c.reaction.convexity)}};
  j["initial"] = {{"kind", c.initial.kind == InitialConfig::Kind::Catalog ? "catalog" : "constant"},
                  {"catalog", to_string(c.initial.catalog)},
                  {"c", c.initial.c},
                  {"value", c.initial.value},
                  {"noise", c.initial.noise}};
  j["tolerances"] = {{"newton", c.tolerances.newton}, {"max_iter", c.tolerances.max_iter}, {"check", c.tolerances.check}};
  if (c.tolerances.stability) j["tolerances"]["stability"] = *c.tolerances.stability;
  j["spectral"] = {{"K", c.spectral.K}, {"nodes", c.spectral.nodes}, {"s", c.spectral.s}, {"runs", c.spectral.runs}};
  j["counterexample"] = {{"epsilon", c.counterexample.epsilon},
                         {"s", c.counterexample.s},
                         {"M_max", c.counterexample.M_max},
                         {"fit_nodes", c.counterexample.fit_nodes}};
  if (c.expect) j["expect"] = *c.expect;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    reject_unknown(j, {"experiment", "domain", "grid", "model", "reaction", "initial", "tolerances", "spectral",
                       "counterexample", "expect", "output_dir", "seed"},
                   "config");
    ExperimentConfig c;
    c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("domain")) {
      const json& d = j["domain"];
      reject_unknown(d, {"kind", "x", "z"}, "domain");
      const auto kind = d.value("kind", std::string("Interval"));
      const auto x = d.at("x").get<std::vector<double>>();
      if (x.size() != 2) throw ArgumentError("domain.x must have two entries");
      if (kind == "Interval") {
        c.domain = DomainSpec::interval(x[0], x[1]);
      } else if (kind == "Rectangle") {
        const auto z = d.at("z").get<std::vector<double>>();
        if (z.size() != 2) throw ArgumentError("domain.z must have two entries");
        c.domain = DomainSpec::rectangle(x[0], x[1], z[0], z[1]);
      } else {
        throw ArgumentError("unknown domain kind '" + kind + "'");
      }
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      reject_unknown(g, {"nx", "ny", "y_max", "grading", "top"}, "grid");
      read(g, "nx", c.grid.nx);
      read(g, "ny", c.grid.ny);
      read(g, "y_max", c.grid.y_max);
      read(g, "grading", c.grid.grading);
      if (g.contains("top")) c.grid.top = top_condition_from_string(g["top"].get<std::string>());
    }
    if (j.contains("model")) {
      const json& m = j["model"];
      reject_unknown(m, {"kind", "theta", "p"}, "model");
      if (m.contains("kind")) c.model.kind = coefficient_kind_from_string(m["kind"].get<std::string>());
      read(m, "theta", c.model.theta);
      read(m, "p", c.model.p);
    }
    if (j.contains("reaction")) {
      const json& r = j["reaction"];
      reject_unknown(r, {"kind", "params", "convexity"}, "reaction");
      if (r.contains("kind"))
        c.reaction.kind = enum_from(r["kind"].get<std::string>(),
                                    std::vector<ReactionKind>{ReactionKind::Linear, ReactionKind::Constant,
                                                              ReactionKind::Cubic, ReactionKind::Polynomial,
                                                              ReactionKind::Exponential, ReactionKind::Custom},
                                    "reaction kind");
      read(r, "params", c.reaction.params);
      if (r.contains("convexity")) c.reaction.convexity = convexity_from_string(r["convexity"].get<std::string>());
    }
    if (j.contains("initial")) {
      const json& i = j["initial"];
      reject_unknown(i, {"kind", "catalog", "c", "value", "noise"}, "initial");
      const auto kind = i.value("kind", std::string("constant"));
      if (kind == "catalog") {
        c.initial.kind = InitialConfig::Kind::Catalog;
      } else if (kind != "constant") {
        throw ArgumentError("unknown initial kind '" + kind + "'");
      }
      if (i.contains("catalog")) c.initial.catalog = catalog_name_from_string(i["catalog"].get<std::string>());
      read(i, "c", c.initial.c);
      read(i, "value", c.initial.value);
      read(i, "noise", c.initial.noise);
    }
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      reject_unknown(t, {"newton", "max_iter", "stability", "check"}, "tolerances");
      read(t, "newton", c.tolerances.newton);
      read(t, "max_iter", c.tolerances.max_iter);
      read(t, "check", c.tolerances.check);
      if (t.contains("stability")) c.tolerances.stability = t["stability"].get<double>();
    }
    if (j.contains("spectral")) {
      const json& s = j["spectral"];
      reject_unknown(s, {"K", "nodes", "s", "runs"}, "spectral");
      read(s, "K", c.spectral.K);
      read(s, "nodes", c.spectral.nodes);
      read(s, "s", c.spectral.s);
      read(s, "runs", c.spectral.runs);
    }
    if (j.contains("counterexample")) {
      const json& s = j["counterexample"];
      reject_unknown(s, {"epsilon", "s", "M_max", "fit_nodes"}, "counterexample");
      read(s, "epsilon", c.counterexample.epsilon);
      read(s, "s", c.counterexample.s);
      read(s, "M_max", c.counterexample.M_max);
      read(s, "fit_nodes", c.counterexample.fit_nodes);
    }
    if (j.contains("expect")) c.expect = j["expect"].get<std::string>();
    read(j, "output_dir", c.output_dir);
    read(j, "seed", c.seed);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
}

void validate(const ExperimentConfig& c) {
  if (!(c.tolerances.newton > 0.0) || !(c.tolerances.check > 0.0) ||
      (c.tolerances.stability && !(*c.tolerances.stability > 0.0)))
    throw ArgumentError("config: tolerances must be positive");
  if (c.tolerances.max_iter < 0) throw ArgumentError("config: max_iter must be nonnegative");
  if (c.grid.nx < 3 || c.grid.ny < 3 || !(c.grid.y_max > 0.0)) throw ArgumentError("config: invalid grid");
  if (!(c.domain.x_max > c.domain.x_min)) throw ArgumentError("config: empty domain");
  if (c.model.kind == CoefficientKind::Custom) throw ArgumentError("config: Custom coefficients need code");
  if (c.reaction.kind == ReactionKind::Custom) throw ArgumentError("config: Custom reactions need code");
  if (c.expect && *c.expect != "Stable" && *c.expect != "Unstable" && *c.expect != "Marginal")
    throw ArgumentError("config: expect must be Stable, Unstable or Marginal");
  if (c.spectral.K < 1 || c.spectral.nodes < 3 || c.spectral.runs < 1) throw ArgumentError("config: invalid spectral");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

CoefficientModel make_model(const ModelConfig& m) {
  switch (m.kind) {
    case CoefficientKind::PowerWeight: return CoefficientModel::power_weight(m.theta);
    case CoefficientKind::PowerWeightPLaplace: return CoefficientModel::power_weight_p_laplace(m.theta, m.p);
    case CoefficientKind::MeanCurvatureWeight: return CoefficientModel::mean_curvature_weight(m.theta);
    case CoefficientKind::ConstantOne: return CoefficientModel::constant_one();
    case CoefficientKind::ExpY: return CoefficientModel::exp_y();
    case CoefficientKind::Custom: break;
  }
  throw ArgumentError("make_model: Custom coefficients cannot be built from a config");
}

ReactionSpec make_reaction(const ReactionConfig& r) {
  auto param = [&](size_t i, double fallback) { return i < r.params.size() ? r.params[i] : fallback; };
  ReactionSpec spec;
  switch (r.kind) {
    case ReactionKind::Linear: spec = ReactionSpec::linear(param(0, 1.0)); break;
    case ReactionKind::Constant: spec = ReactionSpec::constant(param(0, 0.0)); break;
    case ReactionKind::Cubic: spec = ReactionSpec::cubic(); break;
    case ReactionKind::Polynomial: spec = ReactionSpec::polynomial(r.params); break;
    case ReactionKind::Exponential: spec = ReactionSpec::exponential(param(0, 1.0), param(1, 1.0)); break;
    case ReactionKind::Custom: throw ArgumentError("make_reaction: Custom reactions cannot be built from a config");
  }
  if (r.convexity != Convexity::Unset) spec.with_convexity(r.convexity);
  return spec;
}

namespace {

ExperimentConfig stability_preset(CatalogName name, CoefficientKind model, ReactionKind kind, double k,
                                  const std::string& expect) {
  ExperimentConfig c;
  c.experiment = Experiment::Stability;
  c.grid = {65, 65, 8.0, 0.0, TopCondition::Neumann};
  c.model.kind = model;
  c.reaction = {kind, {k}, Convexity::Unset};
  c.initial.kind = InitialConfig::Kind::Catalog;
  c.initial.catalog = name;
  c.expect = expect;
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  out.push_back({"grow-cos-stable", "catalog example: u = e^y cos x with f(u) = -u is stable",
                 stability_preset(CatalogName::GrowCos, CoefficientKind::ConstantOne, ReactionKind::Linear, -1.0,
                                  "Stable")});
  out.push_back({"decay-cos-unstable", "catalog example: u = e^{-y} cos x with f(u) = u is not stable",
                 stability_preset(CatalogName::DecayCos, CoefficientKind::ConstantOne, ReactionKind::Linear, 1.0,
                                  "Unstable")});
  out.push_back({"linear-y-stable", "catalog example: u = y with f = -1 is stable",
                 stability_preset(CatalogName::LinearY, CoefficientKind::ConstantOne, ReactionKind::Constant, -1.0,
                                  "Stable")});
  out.push_back({"exp-decay-stable", "catalog example: u = e^{-y}, a = e^y, f = 1 is stable",
                 stability_preset(CatalogName::ExpDecay, CoefficientKind::ExpY, ReactionKind::Constant, 1.0,
                                  "Stable")});
  {
    ExperimentConfig c;
    c.experiment = Experiment::Solve;
    c.grid = {17, 33, 2.0, 0.0, TopCondition::Dirichlet};
    c.model.kind = CoefficientKind::ExpY;
    c.reaction = {ReactionKind::Constant, {1.0}, Convexity::Unset};
    c.initial = {InitialConfig::Kind::Catalog, CatalogName::OneDimFamily, 1.0, 0.0, 0.05};
    c.seed = 1;
    out.push_back({"one-dim-family", "one-dimensional solutions u(y) = c - f(c) int_0^y dz / a(z)", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::Poincare;
    c.grid = {65, 65, 8.0, 0.0, TopCondition::Neumann};
    c.reaction = {ReactionKind::Linear, {-1.0}, Convexity::Unset};
    c.initial.kind = InitialConfig::Kind::Catalog;
    c.initial.catalog = CatalogName::GrowCos;
    out.push_back({"poincare-grow-cos", "geometric Poincare inequality for a stable solution", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::Spectral;
    c.domain = DomainSpec::rectangle(0.0, kPi, 0.0, kPi);
    c.reaction = {ReactionKind::Cubic, {}, Convexity::Unset};
    c.spectral = {64, 33, 0.5, 5};
    c.tolerances.check = 1e-12;
    c.seed = 7;
    out.push_back({"sneumann-constancy", "stable solutions of the spectral Neumann problem are constant", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::ExtensionEquivalence;
    c.grid = {129, 65, 20.0, 0.0, TopCondition::Neumann};
    c.reaction = {ReactionKind::Polynomial, {1.0, -1.0}, Convexity::Unset};
    c.spectral = {32, 129, 0.5, 1};
    c.tolerances.check = 1e-6;
    c.seed = 7;
    out.push_back({"extension-equivalence", "harmonic extension realizes the half spectral Neumann Laplacian", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::Fractional;
    c.spectral = {64, 257, 0.5, 1};
    out.push_back({"operator-distinctness", "spectral and integral fractional Laplacians differ", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::Counterexample;
    out.push_back({"counterexample", "locally s-harmonic approximation with vanishing fractional normal derivative", c});
  }
  {
    ExperimentConfig c;
    c.experiment = Experiment::VerifyAll;
    out.push_back({"verify-all", "full acceptance suite", c});
  }
  return out;
}

// Smooth seeded perturbation that vanishes at the top of the cylinder.
CylinderField smooth_noise(const GridPtr& grid, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::array<std::array<double, 3>, 3> a{};
  for (auto& row : a)
    for (double& v : row) v = U(rng);
  const auto& d = grid->domain();
  const double Y = grid->y_max();
  return sample(grid, [&](const Point& p) {
    double v = 0.0;
    for (int m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k)
        v += a[m][k] / (1.0 + m + k) * std::cos(m * kPi * (p.x - d.x_min) / d.length_x()) *
             (d.kind == DomainSpec::Kind::Rectangle ? std::cos(k * kPi * (p.z - d.z_min) / d.length_z()) : (k == 0))
             * std::sin(kPi * p.y / Y);
    return amplitude * v;
  });
}

CylinderField initial_field(const ExperimentConfig& c, const GridPtr& grid) {
  CylinderField u(grid, c.initial.value);
  if (c.initial.kind == InitialConfig::Kind::Catalog) {
    CatalogParams params;
    params.c = c.initial.c;
    params.model = make_model(c.model);
    params.reaction = make_reaction(c.reaction);
    u = catalog_solution(c.initial.catalog, params, grid);
  }
  if (c.initial.noise != 0.0) u.values() += smooth_noise(grid, c.initial.noise, c.seed).values();
  return u;
}

CheckRecord make_record(const std::string& name, bool pass, double measured, double tol, const std::string& anchor) {
  CheckRecord r;
  r.name = name;
  r.status = pass ? CheckStatus::Pass : CheckStatus::Fail;
  r.measured = measured;
  r.tolerance = tol;
  r.anchor = anchor;
  return r;
}

struct Outputs {
  std::filesystem::path dir;
  bool enabled;
  void field(const std::string& name, const CylinderField& f) const {
    if (enabled) write_csv((dir / (name + ".csv")).string(), f);
  }
  void series(const std::string& name, const std::string& header, const std::vector<double>& x,
              const Eigen::VectorXd& v) const {
    if (!enabled) return;
    std::ofstream os(dir / (name + ".csv"));
    os.precision(17);
    os << header << '\n';
    for (size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << v[static_cast<int>(i)] << '\n';
  }
};

void run_solve(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  const GridPtr grid = build_grid(c.domain, c.grid.nx, c.grid.ny, c.grid.y_max, c.grid.grading);
  const CoefficientModel model = make_model(c.model);
  const ReactionSpec reaction = make_reaction(c.reaction);
  const CylinderField init = initial_field(c, grid);
  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport sol = solve_newton(model, reaction, grid, init, c.tolerances.newton, c.tolerances.max_iter, c.grid.top);
  CheckRecord& r = rep.add(make_record("newton_converged", sol.converged, sol.final_residual, c.tolerances.newton,
                                       "weak formulation of the boundary reaction problem"));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.data["solve"] = sol;
  if (c.initial.kind == InitialConfig::Kind::Catalog && c.grid.top == TopCondition::Dirichlet) {
    ExperimentConfig clean = c;
    clean.initial.noise = 0.0;
    const double dist = (sol.u.values() - initial_field(clean, grid).values()).lpNorm<Eigen::Infinity>();
    const double tol = grid->max_spacing() * grid->max_spacing();
    rep.add(make_record("catalog_recovered", dist <= tol, dist, tol, "explicit catalog solution"));
  }
  out.field("u", sol.u);
}

void run_stability(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  const GridPtr grid = build_grid(c.domain, c.grid.nx, c.grid.ny, c.grid.y_max, c.grid.grading);
  const CoefficientModel model = make_model(c.model);
  const ReactionSpec reaction = make_reaction(c.reaction);
  const CylinderField u = initial_field(c, grid);
  const auto t0 = std::chrono::steady_clock::now();
  const StabilityReport st = c.tolerances.stability ? classify(u, model, reaction, *c.tolerances.stability)
                                                    : classify(u, model, reaction);
  const bool pass = !c.expect || *c.expect == to_string(st.classification);
  CheckRecord& r = rep.add(make_record("classification", pass, st.mu1, st.tol, "stability functional"));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.details = {{"classification", to_string(st.classification)}, {"expected", c.expect.value_or("")}};
  rep.data["classification"] = to_string(st.classification);
  rep.data["stability"] = st;
  rep.data["ground_state_sign"] = to_string(sign_trichotomy(st.ground_state, 1e-8));
  out.field("u", u);
  out.field("ground_state", st.ground_state);
}

void run_poincare(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  const GridPtr grid = build_grid(c.domain, c.grid.nx, c.grid.ny, c.grid.y_max, c.grid.grading);
  const CoefficientModel model = make_model(c.model);
  const ReactionSpec reaction = make_reaction(c.reaction);
  const CylinderField u = initial_field(c, grid);
  const double Y = c.grid.y_max;
  const auto& d = c.domain;
  std::vector<std::pair<std::string, CylinderField>> psis = {{"log_cutoff_1e4", log_cutoff(1e4, grid)}};
  for (int m = 0; m <= 2; ++m)
    psis.emplace_back("cos" + std::to_string(m), sample(grid, [&](const Point& p) {
                        return std::cos(m * kPi * (p.x - d.x_min) / d.length_x()) * std::cos(0.5 * kPi * p.y / Y);
                      }));
  for (const auto& [label, psi] : psis) {
    const PoincareSides sides = poincare_sides(u, model, reaction, psi);
    CheckRecord& r = rep.add(make_record("poincare_" + label, sides.gap() <= c.tolerances.check, sides.gap(),
                                         c.tolerances.check, "geometric Poincare inequality"));
    r.details = sides;
  }
  out.field("u", u);
}

void run_spectral(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  const BasisPtr basis = neumann_basis(c.domain, c.spectral.K, c.spectral.nodes);
  const ReactionSpec reaction = make_reaction(c.reaction);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  SpectralFunction last;
  json runs = json::array();
  for (int run = 0; run < c.spectral.runs; ++run) {
    Eigen::VectorXd coeffs(basis->K());
    for (int k = 0; k < basis->K(); ++k) coeffs[k] = normal(rng) / (1.0 + k);
    const SemilinearReport sol =
        solve_semilinear(basis, c.spectral.s, reaction, {basis, coeffs}, c.tolerances.newton, c.tolerances.max_iter * 4);
    worst = std::max(worst, sol.v.nonconstant_energy());
    runs.push_back({{"iterations", sol.iterations}, {"nonconstant_energy", sol.v.nonconstant_energy()}});
    last = sol.v;
  }
  rep.add(make_record("nonconstant_energy", worst <= c.tolerances.check, worst, c.tolerances.check,
                      "constancy of stable solutions of the spectral Neumann problem"));
  rep.data["runs"] = runs;
  rep.data["last_solution"] = last;
  if (c.domain.kind == DomainSpec::Kind::Interval) {
    std::vector<double> xs(basis->nodes_per_side());
    for (int i = 0; i < basis->nodes_per_side(); ++i)
      xs[i] = c.domain.x_min + c.domain.length_x() * i / (basis->nodes_per_side() - 1);
    out.series("v", "x,value", xs, last.on_omega());
  }
}

void run_extension(const ExperimentConfig& c, RunReport& rep) {
  const BasisPtr basis = neumann_basis(c.domain, c.spectral.K, c.spectral.nodes);
  const GridPtr grid = build_grid(c.domain, c.grid.nx, c.grid.ny, c.grid.y_max, c.grid.grading);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  Eigen::VectorXd coeffs(basis->K());
  for (int k = 0; k < basis->K(); ++k) coeffs[k] = normal(rng) / (1.0 + k);
  const SpectralFunction init{basis, coeffs};
  const double d = extension_equivalence(basis, make_reaction(c.reaction), grid, c.tolerances.newton, &init);
  CheckRecord& r = rep.add(make_record("extension_discrepancy", d <= c.tolerances.check, d, c.tolerances.check,
                                       "harmonic extension of the half spectral Neumann Laplacian"));
  r.details = {{"tail", basis->K() > 1 ? std::exp(-std::sqrt(basis->lambda(1)) * c.grid.y_max) : 0.0}};
}

void run_fractional(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  if (c.domain.kind != DomainSpec::Kind::Interval) throw NotApplicableError("Fractional needs an interval domain");
  const BasisPtr basis = neumann_basis(c.domain, c.spectral.K, c.spectral.nodes);
  const double mid = 0.5 * (c.domain.x_min + c.domain.x_max), width = 0.25 * c.domain.length_x();
  const int n = basis->nodes_per_side();
  std::vector<double> xs(n);
  Eigen::VectorXd vals(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = c.domain.x_min + c.domain.length_x() * i / (n - 1);
    const double r = (xs[i] - mid) / width;
    vals[i] = std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
  }
  const SpectralFunction w = project(basis, vals);
  const double d = compare_operators(w, c.spectral.s, true);
  rep.add(make_record("operator_discrepancy", d > 0.01, d, 0.01, "spectral and integral fractional Laplacians differ"));
  out.series("bump", "x,value", xs, w.on_omega());
}

void run_counterexample(const ExperimentConfig& c, RunReport& rep, const Outputs& out) {
  CounterexampleOptions o;
  o.epsilon = c.counterexample.epsilon;
  o.s = c.counterexample.s;
  o.M_max = c.counterexample.M_max;
  o.fit_nodes = c.counterexample.fit_nodes;
  const ProfileFn zero = [](double) { return Profile{0.0, 0.0, 0.0}; };
  const std::string anchor = "locally s-harmonic approximation with vanishing fractional normal derivative";
  try {
    const CounterexampleResult r = construct_counterexample(zero, o);
    const double lo = o.epsilon / 11.0, hi = 4.0 * o.epsilon / 11.0;
    const bool in_band = r.delta1 >= lo && r.delta1 <= hi && r.delta2 >= lo && r.delta2 <= hi;
    rep.add(make_record("delta_in_band", in_band, std::max(r.delta1, r.delta2), hi, anchor));
    rep.add(make_record("interior_residual", r.interior_residual <= 1e-8, r.interior_residual, 1e-8, anchor));
    const double nd = std::max(std::abs(r.normal_derivative_left), std::abs(r.normal_derivative_right));
    rep.add(make_record("fractional_normal_derivative", nd <= 1e-4, nd, 1e-4, anchor));
    rep.data["counterexample"] = r;
    out.series("v", "x,value", r.nodes, r.v);
  } catch (const NoRootError& e) {
    CheckRecord& r = rep.add(make_record("no_root", false, e.residual(), 1.0, anchor));
    r.details = {{"message", e.what()}, {"band_residual", e.residual()}};
  }
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ArgumentError("unknown preset '" + name + "'");
}

RunReport run_experiment(const ExperimentConfig& config, bool write_outputs) {
  validate(config);
  namespace fs = std::filesystem;
  const Outputs out{fs::path(config.output_dir), write_outputs};
  if (write_outputs) fs::create_directories(out.dir);

  RunReport rep;
  if (config.experiment == Experiment::VerifyAll) {
    rep = verify_all(false, 1, write_outputs ? config.output_dir : "");
    return rep;
  }
  rep.experiment = to_string(config.experiment);
  rep.data["config"] = config_to_json(config);
  try {
    switch (config.experiment) {
      case Experiment::Solve: run_solve(config, rep, out); break;
      case Experiment::Stability: run_stability(config, rep, out); break;
      case Experiment::Poincare: run_poincare(config, rep, out); break;
      case Experiment::Spectral: run_spectral(config, rep, out); break;
      case Experiment::ExtensionEquivalence: run_extension(config, rep); break;
      case Experiment::Fractional: run_fractional(config, rep, out); break;
      case Experiment::Counterexample: run_counterexample(config, rep, out); break;
      case Experiment::VerifyAll: break;
    }
  } catch (const SolverError& e) {
    CheckRecord& r = rep.add(make_record("solver_failure", false, e.trace().empty() ? 0.0 : e.trace().back(), 0.0,
                                         "plumbing"));
    r.details = {{"message", e.what()}, {"trace", e.trace()}};
  } catch (const NotApplicableError& e) {
    CheckRecord& r = rep.add(make_record("not_applicable", true, 0.0, 0.0, "plumbing"));
    r.status = CheckStatus::NotApplicable;
    r.details = {{"message", e.what()}};
  }
  if (write_outputs) write_report((out.dir / "report.json").string(), rep);
  return rep;
}

}  // namespace stablecyl
