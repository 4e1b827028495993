#include "sepx/separatrix.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "sepx/errors.hpp"

namespace sepx {

Matrix SeparatrixPointSet::matrix() const {
  Matrix m(static_cast<Eigen::Index>(points.size()), dim);
  for (std::size_t j = 0; j < points.size(); ++j) m.row(static_cast<Eigen::Index>(j)) = points[j];
  return m;
}

std::vector<double> equispaced(int n, double gamma) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = i * gamma / (n - 1);
  xs.back() = gamma;
  return xs;
}

std::vector<ProbePair> boundary_probes(int dim, int n, double gamma) {
  if (dim != 2 && dim != 3) throw ContractError("probe dimension must be 2 or 3");
  if (n < 2) throw ContractError("need at least 2 probes per edge");
  if (!(gamma > 0.0)) throw ContractError("domain size gamma must be > 0");

  const auto xs = equispaced(n, gamma);
  std::vector<ProbePair> pairs;
  if (dim == 2) {
    pairs.reserve(2 * xs.size());
    for (double x : xs) {
      pairs.push_back({State{{x, 0.0}}, State{{x, gamma}}, 1});
    }
    for (double y : xs) {
      pairs.push_back({State{{0.0, y}}, State{{gamma, y}}, 0});
    }
    return pairs;
  }

  pairs.reserve(3 * xs.size() * xs.size());
  for (double s : xs) {
    for (double t : xs) pairs.push_back({State{{s, t, 0.0}}, State{{s, t, gamma}}, 2});
  }
  for (double s : xs) {
    for (double t : xs) pairs.push_back({State{{s, 0.0, t}}, State{{s, gamma, t}}, 1});
  }
  for (double s : xs) {
    for (double t : xs) pairs.push_back({State{{0.0, s, t}}, State{{gamma, s, t}}, 0});
  }
  return pairs;
}

void BisectionConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be > 0");
  if (max_iter < 1) throw ConfigError("bisection max_iter must be >= 1");
}

BisectOutcome bisect(const Model& model, const ProbePair& pair,
                     std::span<const Equilibrium> attractors, const ClassifierConfig& classifier,
                     const BisectionConfig& bisection,
                     std::span<const Equilibrium> boundary_equilibria) {
  bisection.validate();
  BisectOutcome out;

  const auto low_cls = classify(model, pair.low, attractors, classifier, boundary_equilibria);
  const auto high_cls = classify(model, pair.high, attractors, classifier, boundary_equilibria);
  if (!low_cls.resolved() || !high_cls.resolved()) {
    out.status = BisectStatus::skipped;
    out.diagnostic = "endpoint unresolved (" + low_cls.label + ", " + high_cls.label + ")";
    return out;
  }
  out.low_attractor = *low_cls.attractor;
  out.high_attractor = *high_cls.attractor;
  if (out.low_attractor == out.high_attractor) {
    out.status = BisectStatus::no_crossing;
    return out;
  }

  State lo = pair.low;
  State hi = pair.high;
  out.status = BisectStatus::hit;
  while ((hi - lo).norm() >= bisection.tol) {
    if (out.iterations >= bisection.max_iter) {
      out.low_confidence = true;
      out.diagnostic = "max_iter reached before tolerance";
      break;
    }
    ++out.iterations;
    State mid = 0.5 * (lo + hi);
    const auto mid_cls = classify(model, mid, attractors, classifier, boundary_equilibria);
    if (!mid_cls.resolved()) {
      out.low_confidence = true;
      out.diagnostic = "midpoint unresolved";
      out.point = std::move(mid);
      return out;
    }
    if (*mid_cls.attractor == out.low_attractor) {
      lo = std::move(mid);
    } else if (*mid_cls.attractor == out.high_attractor) {
      hi = std::move(mid);
    } else {
      out.low_confidence = true;
      out.diagnostic = "midpoint reached a third attractor";
      out.point = std::move(mid);
      return out;
    }
  }
  out.point = 0.5 * (lo + hi);
  return out;
}

std::size_t DetectionResult::low_confidence_count() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
    return r.outcome.status == BisectStatus::hit && r.outcome.low_confidence;
  }));
}

DetectionResult detect(const Model& model, int n, double gamma, const DetectConfig& cfg) {
  cfg.classifier.validate();
  cfg.bisection.validate();

  DetectionResult result;
  result.attractors = model.stable_attractors();
  if (result.attractors.size() != 2) {
    throw ConfigError("separatrix detection needs exactly two stable attractors, found " +
                      std::to_string(result.attractors.size()));
  }
  check_attractors(result.attractors, cfg.classifier.capture_radius);
  result.boundary_equilibria = model.boundary_equilibria();

  result.probes = boundary_probes(model.dim(), n, gamma);
  const std::size_t count = result.probes.size();
  std::vector<BisectOutcome> outcomes(count);

  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        outcomes[i] = bisect(model, result.probes[i], result.attractors, cfg.classifier,
                             cfg.bisection, result.boundary_equilibria);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  result.points.dim = model.dim();
  result.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (outcomes[i].status == BisectStatus::hit) {
      result.points.points.push_back(outcomes[i].point);
      result.hit_probes.push_back(i);
    }
    result.records.push_back({i, std::move(outcomes[i])});
  }
  return result;
}

}  // namespace sepx
