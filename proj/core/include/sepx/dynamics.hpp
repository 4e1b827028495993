#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepx/models.hpp"

namespace sepx {

struct IntegratorConfig {
  double step = 1e-2;  ///< initial step
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double t_max = 1000.0;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

struct TrajectoryPoint {
  double t;
  State x;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Called after every accepted step; returning true stops the integration.
using StepObserver = std::function<bool(double t, const State& x)>;

/// Adaptive Dormand-Prince 5(4) integration of the model from x0 over
/// [0, cfg.t_max]. Negative coordinates are clamped to zero before each RHS
/// evaluation. Returns the final time reached.
///
/// Throws IntegrationError on step-size underflow or a non-finite state.
double integrate_observed(const Model& model, const State& x0, const IntegratorConfig& cfg,
                          const StepObserver& observer);

/// Full trajectory including the initial point.
Trajectory integrate(const Model& model, const State& x0, const IntegratorConfig& cfg);

/// What to do with a trajectory that starts on an invariant face and is still
/// sitting at a non-attractor boundary equilibrium when t_max is reached.
enum class BoundarySettle {
  nearest_attractor,  ///< label it with the attractor closest to that equilibrium
  unresolved,         ///< report Unresolved
};

struct ClassifierConfig {
  IntegratorConfig integrator;
  double capture_radius = 1e-3;  ///< max-norm ball around each attractor
  int dwell_steps = 10;          ///< consecutive accepted steps inside the ball
  BoundarySettle boundary_settle = BoundarySettle::nearest_attractor;

  void validate() const;
  bool operator==(const ClassifierConfig&) const = default;
};

struct ClassificationResult {
  /// Index into the attractor list; empty means Unresolved.
  std::optional<std::size_t> attractor;
  std::string label;          ///< attractor label or "Unresolved"
  double time_to_converge;    ///< time the trajectory entered the capture ball for good
  State final_state;
  /// Boundary equilibrium the trajectory settled at when the label was
  /// assigned by proximity; empty otherwise.
  std::string settled_at;

  bool resolved() const { return attractor.has_value(); }
};

/// Throws ConfigError if the attractor list is empty, contains a non-stable
/// point, or two capture balls overlap.
void check_attractors(std::span<const Equilibrium> attractors, double capture_radius);

/// Integrates from x0 until the trajectory has stayed inside one attractor's
/// capture ball for dwell_steps consecutive accepted steps. A run that reaches
/// t_max inside a ball is also captured; otherwise the result is Unresolved.
///
/// A start point with a zero coordinate never leaves its invariant face. If
/// such a trajectory ends inside the capture ball of one of
/// `boundary_equilibria`, cfg.boundary_settle decides its label.
ClassificationResult classify(const Model& model, const State& x0,
                              std::span<const Equilibrium> attractors,
                              const ClassifierConfig& cfg,
                              std::span<const Equilibrium> boundary_equilibria = {});

std::string to_string(BoundarySettle policy);
BoundarySettle parse_boundary_settle(const std::string& name);

}  // namespace sepx
