#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "sepx/config.hpp"
#include "sepx/pu_interp.hpp"
#include "sepx/refine.hpp"
#include "sepx/separatrix.hpp"

namespace sepx {

/// Stage file names inside the output directory.
namespace files {
inline constexpr const char* equilibria = "equilibria.json";
inline constexpr const char* raw_points = "raw_points.csv";
inline constexpr const char* refined_points = "refined_points.csv";
inline constexpr const char* refined_meta = "refined_points.json";
inline constexpr const char* model = "model.json";
inline constexpr const char* grid = "grid.csv";
inline constexpr const char* manifest = "manifest.json";
}  // namespace files

struct StageOptions {
  std::filesystem::path out_dir;
  bool emit_trajectories = false;
  std::ostream* log = nullptr;  ///< warnings and diagnostics; null = silent
};

/// JSON array of {label, location, feasible, stability, eigenvalues, table}
/// records. Each record also carries the literal table evaluation and whether
/// it disagrees with the eigenvalue classification.
std::string equilibria_report(const Model& model);

/// Equilibria whose eigenvalue classification contradicts the closed-form
/// table (hyperbolic, feasible points only).
std::vector<std::string> table_disagreements(const Model& model);

void run_equilibria(const PipelineConfig& cfg, const StageOptions& opts);
DetectionResult run_detect(const PipelineConfig& cfg, const StageOptions& opts);
/// Reads raw_points.csv; writes the augmented refined set and its sidecar.
RefinedPointSet run_refine(const PipelineConfig& cfg, const StageOptions& opts);
/// Reads the refined set; writes model.json and grid.csv.
PUInterpolant run_reconstruct(const PipelineConfig& cfg, const StageOptions& opts);
/// Integrates each initial condition to t_max and writes trajectory_<k>.csv.
void run_trajectories(const PipelineConfig& cfg, const StageOptions& opts,
                      const std::vector<State>& initial_conditions);
void run_pipeline(const PipelineConfig& cfg, const StageOptions& opts);

/// Serialized fitted model: beta, d, overlap, cells, nodes and coefficients.
std::string model_json(const PUInterpolant& interpolant, int d);

/// Evaluates the interpolant on a regular grid over its covering domain; rows
/// are (x, s) or (x, y, s).
std::vector<State> evaluation_grid(const PUInterpolant& interpolant, int resolution);

}  // namespace sepx
