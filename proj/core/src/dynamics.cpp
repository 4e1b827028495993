#include "sepx/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sepx/errors.hpp"

namespace sepx {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

class ClampedRhs {
 public:
  explicit ClampedRhs(const Model& model) : model_(model), buf_(model.dim()) {}

  void operator()(const State& x, State& dxdt) {
    for (Eigen::Index i = 0; i < x.size(); ++i) buf_(i) = std::max(0.0, x(i));
    model_.rhs_into(buf_.data(), dxdt.data());
  }

 private:
  const Model& model_;
  State buf_;
};

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !(abs_tol > 0.0) || !(rel_tol > 0.0) || !(t_max > 0.0)) {
    throw ConfigError("integrator step, tolerances and t_max must be > 0");
  }
}

void ClassifierConfig::validate() const {
  integrator.validate();
  if (!(capture_radius > 0.0)) throw ConfigError("capture radius must be > 0");
  if (dwell_steps < 0) throw ConfigError("dwell steps must be >= 0");
}

double integrate_observed(const Model& model, const State& x0, const IntegratorConfig& cfg,
                          const StepObserver& observer) {
  const int n = model.dim();
  if (x0.size() != n) throw ContractError("initial state dimension mismatch");
  if (!x0.allFinite()) throw ContractError("initial state must be finite");
  if ((x0.array() < 0.0).any()) throw ContractError("initial state must be nonnegative");
  cfg.validate();

  ClampedRhs f(model);
  State x = x0, xn(n), tmp(n), err(n);
  std::array<State, 7> k;
  for (auto& ki : k) ki.resize(n);

  double t = 0.0;
  double h = std::min(cfg.step, cfg.t_max);
  if (observer && observer(t, x)) return t;

  f(x, k[0]);
  while (t < cfg.t_max) {
    h = std::min(h, cfg.t_max - t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t)) {
      throw IntegrationError("step size underflow at t=" + std::to_string(t));
    }

    tmp = x + h * a21 * k[0];
    f(tmp, k[1]);
    tmp = x + h * (a31 * k[0] + a32 * k[1]);
    f(tmp, k[2]);
    tmp = x + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    f(tmp, k[3]);
    tmp = x + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    f(tmp, k[4]);
    tmp = x + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
    f(tmp, k[5]);
    xn = x + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
    f(xn, k[6]);
    err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);

    double err_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x(i)), std::abs(xn(i)));
      err_norm = std::max(err_norm, std::abs(err(i)) / scale);
    }
    if (!std::isfinite(err_norm) || !xn.allFinite()) {
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t)) {
        throw IntegrationError("non-finite state at t=" + std::to_string(t));
      }
      h *= kMinFactor;
      continue;
    }

    if (err_norm <= 1.0) {
      t += h;
      x.swap(xn);
      std::swap(k[0], k[6]);  // first-same-as-last
      const double factor =
          err_norm == 0.0 ? kMaxFactor
                          : std::clamp(kSafety * std::pow(err_norm, -0.2), kMinFactor, kMaxFactor);
      h *= factor;
      if (observer && observer(t, x)) return t;
    } else {
      h *= std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2));
    }
  }
  return t;
}

Trajectory integrate(const Model& model, const State& x0, const IntegratorConfig& cfg) {
  Trajectory out;
  integrate_observed(model, x0, cfg, [&](double t, const State& x) {
    out.push_back({t, x});
    return false;
  });
  return out;
}

void check_attractors(std::span<const Equilibrium> attractors, double capture_radius) {
  if (attractors.empty()) throw ConfigError("no attractors given");
  for (const auto& a : attractors) {
    if (!a.computable || a.stability != Stability::stable) {
      throw ConfigError("attractor " + a.label + " is not a stable equilibrium");
    }
  }
  for (std::size_t i = 0; i < attractors.size(); ++i) {
    for (std::size_t j = i + 1; j < attractors.size(); ++j) {
      const double dist =
          (attractors[i].location - attractors[j].location).lpNorm<Eigen::Infinity>();
      if (dist < 2.0 * capture_radius) {
        throw ConfigError("capture balls of " + attractors[i].label + " and " +
                          attractors[j].label + " overlap");
      }
    }
  }
}

std::string to_string(BoundarySettle policy) {
  return policy == BoundarySettle::nearest_attractor ? "nearest_attractor" : "unresolved";
}

BoundarySettle parse_boundary_settle(const std::string& name) {
  if (name == "nearest_attractor") return BoundarySettle::nearest_attractor;
  if (name == "unresolved") return BoundarySettle::unresolved;
  throw ConfigError("boundary_settle must be 'nearest_attractor' or 'unresolved', got '" + name +
                    "'");
}

ClassificationResult classify(const Model& model, const State& x0,
                              std::span<const Equilibrium> attractors,
                              const ClassifierConfig& cfg,
                              std::span<const Equilibrium> boundary_equilibria) {
  check_attractors(attractors, cfg.capture_radius);

  std::optional<std::size_t> current;
  double entry_time = 0.0;
  int dwell = 0;
  State last = x0;

  const double t_end = integrate_observed(model, x0, cfg.integrator, [&](double t, const State& x) {
    last = x;
    std::optional<std::size_t> inside;
    for (std::size_t i = 0; i < attractors.size(); ++i) {
      if ((x - attractors[i].location).lpNorm<Eigen::Infinity>() < cfg.capture_radius) {
        inside = i;
        break;
      }
    }
    if (!inside) {
      current.reset();
      dwell = 0;
      return false;
    }
    if (inside != current) {
      current = inside;
      entry_time = t;
      dwell = 0;
    } else {
      ++dwell;
    }
    return dwell >= cfg.dwell_steps;
  });

  ClassificationResult result;
  result.final_state = last;
  // Steps grow quickly once the state stops moving, so a run can hit t_max
  // inside a ball before completing the dwell count.
  if (current && (dwell >= cfg.dwell_steps || t_end >= cfg.integrator.t_max)) {
    result.attractor = current;
    result.label = attractors[*current].label;
    result.time_to_converge = entry_time;
    return result;
  }

  result.label = "Unresolved";
  result.time_to_converge = cfg.integrator.t_max;
  const bool on_face = (x0.array() == 0.0).any();
  if (cfg.boundary_settle != BoundarySettle::nearest_attractor || !on_face) return result;
  for (const auto& eq : boundary_equilibria) {
    if ((last - eq.location).lpNorm<Eigen::Infinity>() >= cfg.capture_radius) continue;
    std::size_t best = 0;
    for (std::size_t i = 1; i < attractors.size(); ++i) {
      if ((attractors[i].location - eq.location).norm() <
          (attractors[best].location - eq.location).norm()) {
        best = i;
      }
    }
    result.attractor = best;
    result.label = attractors[best].label;
    result.settled_at = eq.label;
    break;
  }
  return result;
}

}  // namespace sepx
