#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sepx/dynamics.hpp"
#include "sepx/models.hpp"

namespace sepx {

/// Segment between two opposing faces of [0,gamma]^dim; the endpoints differ
/// only in coordinate `axis`.
struct ProbePair {
  State low;
  State high;
  int axis = 0;
};

/// Rows of the detected point matrix, one per successful bisection.
struct SeparatrixPointSet {
  int dim = 2;
  std::vector<State> points;

  std::size_t size() const { return points.size(); }
  Matrix matrix() const;
};

/// Equispaced probe coordinates (i-1) * gamma / (n-1), i = 1..n.
std::vector<double> equispaced(int n, double gamma);

/// 2D: n vertical pairs (x_i,0)-(x_i,gamma) followed by n horizontal pairs
/// (0,y_i)-(gamma,y_i). 3D: three face families of n*n pairs each, varying
/// z, then y, then x; the outer loop runs over the first free coordinate.
std::vector<ProbePair> boundary_probes(int dim, int n, double gamma);

struct BisectionConfig {
  double tol = 1e-5;  ///< bracket length at which bisection stops
  int max_iter = 60;

  void validate() const;
  bool operator==(const BisectionConfig&) const = default;
};

enum class BisectStatus { hit, no_crossing, skipped };

struct BisectOutcome {
  BisectStatus status = BisectStatus::no_crossing;
  State point;                  ///< valid when status == hit
  bool low_confidence = false;  ///< midpoint Unresolved or max_iter reached
  int iterations = 0;
  std::size_t low_attractor = 0;
  std::size_t high_attractor = 0;
  std::string diagnostic;
};

/// Bisects the probe segment on the attractor label. Returns no_crossing when
/// both endpoints reach the same attractor and skipped when either endpoint is
/// Unresolved.
BisectOutcome bisect(const Model& model, const ProbePair& pair,
                     std::span<const Equilibrium> attractors, const ClassifierConfig& classifier,
                     const BisectionConfig& bisection,
                     std::span<const Equilibrium> boundary_equilibria = {});

struct DetectConfig {
  ClassifierConfig classifier;
  BisectionConfig bisection;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct ProbeRecord {
  std::size_t probe_index;
  BisectOutcome outcome;
};

struct DetectionResult {
  SeparatrixPointSet points;
  std::vector<ProbePair> probes;
  std::vector<ProbeRecord> records;  ///< one per probe, in probe order
  std::vector<Equilibrium> attractors;
  std::vector<Equilibrium> boundary_equilibria;

  /// Probe behind each row of `points`.
  std::vector<std::size_t> hit_probes;
  std::size_t low_confidence_count() const;
};

/// Runs bisect over every boundary probe. Requires exactly two stable
/// attractors; throws ConfigError otherwise. Probes run concurrently, results
/// are gathered in probe order.
DetectionResult detect(const Model& model, int n, double gamma, const DetectConfig& cfg);

}  // namespace sepx
