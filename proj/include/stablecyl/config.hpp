#pragma once

#include "stablecyl/coefficients.hpp"
#include "stablecyl/cylinder.hpp"
#include "stablecyl/reaction.hpp"
#include "stablecyl/report.hpp"
#include "stablecyl/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stablecyl {

enum class Experiment { Solve, Stability, Poincare, Spectral, ExtensionEquivalence, Fractional, Counterexample, VerifyAll };
std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

struct GridConfig {
  int nx = 33;
  int ny = 33;
  double y_max = 4.0;
  double grading = 0.0;
  TopCondition top = TopCondition::Neumann;
  bool operator==(const GridConfig&) const = default;
};

// Built-in coefficient kinds only; Custom cannot be read from a file.
struct ModelConfig {
  CoefficientKind kind = CoefficientKind::ConstantOne;
  double theta = 0.0;
  double p = 2.0;
  bool operator==(const ModelConfig&) const = default;
};

struct ReactionConfig {
  ReactionKind kind = ReactionKind::Constant;
  std::vector<double> params{0.0};
  Convexity convexity = Convexity::Unset;
  bool operator==(const ReactionConfig&) const = default;
};

// Starting field: a catalog solution, optionally perturbed below the top by
// smooth seeded noise of amplitude `noise`, or the constant `value`.
struct InitialConfig {
  enum class Kind { Catalog, Constant };
  Kind kind = Kind::Constant;
  CatalogName catalog = CatalogName::LinearY;
  double c = 0.0;
  double value = 0.0;
  double noise = 0.0;
  bool operator==(const InitialConfig&) const = default;
};

struct Tolerances {
  double newton = 1e-10;
  int max_iter = 50;
  std::optional<double> stability;  // absent: default_stability_tol
  double check = 1e-8;
  bool operator==(const Tolerances&) const = default;
};

struct SpectralConfig {
  int K = 32;
  int nodes = 129;
  double s = 0.5;
  int runs = 5;
  bool operator==(const SpectralConfig&) const = default;
};

struct CounterexampleConfig {
  double epsilon = 0.5;
  double s = 0.5;
  double M_max = 64.0;
  int fit_nodes = 801;
  bool operator==(const CounterexampleConfig&) const = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Solve;
  DomainSpec domain = DomainSpec::interval(0.0, 3.141592653589793);
  GridConfig grid;
  ModelConfig model;
  ReactionConfig reaction;
  InitialConfig initial;
  Tolerances tolerances;
  SpectralConfig spectral;
  CounterexampleConfig counterexample;
  std::optional<std::string> expect;  // expected classification for Stability
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ArgumentError on unknown keys, bad enums or nonpositive tolerances.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& c);

CoefficientModel make_model(const ModelConfig& m);
ReactionSpec make_reaction(const ReactionConfig& r);

struct Preset {
  std::string name;
  std::string anchor;
  ExperimentConfig config;
};
const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

// Runs the configured experiment. Writes report.json and CSV fields into
// config.output_dir when `write_outputs` is set.
RunReport run_experiment(const ExperimentConfig& config, bool write_outputs = true);

}  // namespace stablecyl
