#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sepx/dynamics.hpp"
#include "sepx/models.hpp"
#include "sepx/separatrix.hpp"

namespace sepx {

/// Everything one pipeline run needs. Read from a JSON file whose "model"
/// key ("two_pop" | "three_pop") selects the parameter block.
struct PipelineConfig {
  ModelParams params = TwoPopParams{};
  double gamma = 10.0;  ///< domain [0,gamma]^dim
  int n = 12;           ///< probes per edge (2D) or per face axis (3D)
  int L = 10;
  int H = 13;           ///< only used by the 3D model
  double beta = 0.025;  ///< Wendland shape parameter
  int d = 3;            ///< PU subdomain count
  double overlap = 1.5;
  ClassifierConfig classifier;
  BisectionConfig bisection;  ///< tol defaults to 1e-6 * gamma when absent
  std::string output_dir = "out";
  std::uint64_t seed = 0;  ///< reserved
  unsigned threads = 0;
  int grid_resolution = 101;
  std::vector<State> initial_conditions;

  int dim() const { return std::holds_alternative<TwoPopParams>(params) ? 2 : 3; }
  std::string model_name() const { return dim() == 2 ? "two_pop" : "three_pop"; }

  /// Throws ConfigError on invalid values; returns non-fatal warnings (beta
  /// outside the range known to work for the model).
  std::vector<std::string> validate() const;
  DetectConfig detect_config() const;

  bool operator==(const PipelineConfig&) const;
};

PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& cfg);

/// FNV-1a 64 of the serialized config.
std::uint64_t config_hash(const PipelineConfig& cfg);

/// Configs reproducing the published 2D and 3D experiments.
PipelineConfig reference_two_pop_config();
PipelineConfig reference_three_pop_config();

}  // namespace sepx
