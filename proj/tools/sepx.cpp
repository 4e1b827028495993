// sepx: detect, refine and reconstruct separatrix manifolds of the two- and
// three-population competition models.
//
//   sepx pipeline --config configs/two_pop.json --out out/two_pop
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepx/config.hpp"
#include "sepx/errors.hpp"
#include "sepx/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

sepx::State parse_state(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw sepx::ConfigError("cannot parse initial condition '" + text + "'");
    }
  }
  return Eigen::Map<const sepx::State>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separatrix detection and reconstruction for competition models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool emit_trajectories = false;
  int grid_resolution = 0;
  std::vector<std::string> x0_args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON pipeline config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
  };

  auto* equilibria = app.add_subcommand("equilibria", "write the equilibrium report");
  auto* detect = app.add_subcommand("detect", "bisection detection of separatrix points");
  auto* refine = app.add_subcommand("refine", "bin-average raw points, append origin and saddle");
  auto* reconstruct = app.add_subcommand("reconstruct", "fit the partition of unity interpolant");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage");
  auto* trajectory = app.add_subcommand("trajectory", "dump trajectories as CSV");
  for (auto* sub : {equilibria, detect, refine, reconstruct, pipeline, trajectory}) add_common(sub);
  for (auto* sub : {detect, pipeline}) {
    sub->add_flag("--emit-trajectories", emit_trajectories,
                  "also dump trajectories of the configured initial conditions");
  }
  for (auto* sub : {reconstruct, pipeline}) {
    sub->add_option("--grid-resolution", grid_resolution, "evaluation grid points per axis")
        ->check(CLI::PositiveNumber);
  }
  trajectory->add_option("--x0", x0_args, "initial condition, comma separated (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    auto cfg = sepx::load_config(config_path);
    if (grid_resolution > 0) cfg.grid_resolution = grid_resolution;
    sepx::StageOptions opts;
    opts.out_dir = out_dir.empty() ? cfg.output_dir : out_dir;
    opts.emit_trajectories = emit_trajectories;
    opts.log = &std::cerr;

    if (*equilibria) {
      sepx::run_equilibria(cfg, opts);
    } else if (*detect) {
      sepx::run_detect(cfg, opts);
    } else if (*refine) {
      sepx::run_refine(cfg, opts);
    } else if (*reconstruct) {
      sepx::run_reconstruct(cfg, opts);
    } else if (*pipeline) {
      sepx::run_pipeline(cfg, opts);
    } else if (*trajectory) {
      std::vector<sepx::State> ics;
      for (const auto& s : x0_args) ics.push_back(parse_state(s));
      if (ics.empty()) ics = cfg.initial_conditions;
      if (ics.empty()) throw sepx::ConfigError("no initial conditions given (--x0 or config)");
      for (const auto& x0 : ics) {
        if (x0.size() != cfg.dim() || (x0.array() < 0.0).any()) {
          throw sepx::ConfigError("initial conditions must be nonnegative with " +
                                  std::to_string(cfg.dim()) + " components");
        }
      }
      sepx::run_trajectories(cfg, opts, ics);
    }
  } catch (const sepx::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sepx::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sepx::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
