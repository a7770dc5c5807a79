#include "stablecyl/config.hpp"
#include "stablecyl/errors.hpp"
#include "stablecyl/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

using namespace stablecyl;

namespace {

// Exit codes: 0 all applicable checks pass, 1 a check failed, 2 usage or parse error.
int print_and_code(const RunReport& report) {
  for (const auto& c : report.checks)
    std::printf("%-15s %-32s measured=%-12.5g tol=%-10.3g %s\n", to_string(c.status).c_str(), c.name.c_str(),
                c.measured, c.tolerance, c.anchor.c_str());
  std::printf("%s: %s\n", report.experiment.c_str(), report.passed() ? "pass" : "fail");
  return report.passed() ? 0 : 1;
}

int env_threads(int fallback) {
  if (const char* t = std::getenv("STABLECYL_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) return n;
  }
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary reaction problems on half-cylinders: solve, classify and verify"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a named preset");
  preset->add_option("name", preset_name, "Preset name")->required();

  auto* list = app.add_subcommand("list-presets", "List the named presets");
  std::string dump_name;
  auto* dump = app.add_subcommand("dump-preset", "Print the config JSON of a preset");
  dump->add_option("name", dump_name, "Preset name")->required();

  bool parallel = false;
  std::string out_dir = "out/verify";
  auto* verify = app.add_subcommand("verify-all", "Run the acceptance suite");
  verify->add_flag("--parallel", parallel, "Run checks concurrently");
  verify->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const char* env_out = std::getenv("STABLECYL_OUTPUT_DIR");
  try {
    if (*list) {
      for (const auto& p : presets())
        std::printf("%-24s %-22s %s\n", p.name.c_str(), to_string(p.config.experiment).c_str(), p.anchor.c_str());
      return 0;
    }
    if (*dump) {
      std::cout << config_to_json(find_preset(dump_name).config).dump(2) << '\n';
      return 0;
    }
    if (*verify) {
      if (env_out) out_dir = env_out;
      const int threads = env_threads(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
      return print_and_code(verify_all(parallel, threads, out_dir));
    }
    ExperimentConfig config;
    if (*run) {
      config = load_config(config_path);
    } else {
      config = find_preset(preset_name).config;
      config.output_dir = "out/" + preset_name;
    }
    if (env_out) config.output_dir = env_out;
    const RunReport report = run_experiment(config, true);
    std::printf("report: %s/report.json\n", config.output_dir.c_str());
    return print_and_code(report);
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 1;
  }
}
