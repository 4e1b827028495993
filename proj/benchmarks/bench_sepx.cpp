#include <benchmark/benchmark.h>

#include <random>

#include "sepx/config.hpp"
#include "sepx/dynamics.hpp"
#include "sepx/pu_interp.hpp"
#include "sepx/refine.hpp"
#include "sepx/separatrix.hpp"

using namespace sepx;

namespace {

struct Reference {
  PipelineConfig cfg;
  Model model;
  DetectionResult detection;
  RefinedPointSet refined;

  explicit Reference(PipelineConfig c) : cfg(std::move(c)), model(cfg.params) {
    detection = detect(model, cfg.n, cfg.gamma, cfg.detect_config());
    auto raw = cfg.dim() == 2 ? refine_2d(detection.points, cfg.L)
                              : refine_3d(detection.points, cfg.L, cfg.H);
    refined = augment(std::move(raw), *model.interior_saddle());
  }
};

const Reference& two_pop() {
  static const Reference ref(reference_two_pop_config());
  return ref;
}

const Reference& three_pop() {
  static const Reference ref(reference_three_pop_config());
  return ref;
}

const Reference& pick(int dim) { return dim == 2 ? two_pop() : three_pop(); }

void BM_Classify(benchmark::State& state) {
  const auto& ref = pick(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, ref.cfg.gamma);
  for (auto _ : state) {
    State x0(ref.cfg.dim());
    for (auto& v : x0) v = u(rng);
    benchmark::DoNotOptimize(classify(ref.model, x0, ref.detection.attractors, ref.cfg.classifier,
                                      ref.detection.boundary_equilibria));
  }
}
BENCHMARK(BM_Classify)->Arg(2)->Arg(3);

void BM_Detect(benchmark::State& state) {
  const auto& ref = pick(static_cast<int>(state.range(0)));
  auto cfg = ref.cfg.detect_config();
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(detect(ref.model, ref.cfg.n, ref.cfg.gamma, cfg));
}
BENCHMARK(BM_Detect)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto& ref = pick(static_cast<int>(state.range(0)));
  const auto data = graph_data(ref.refined);
  const auto domain = graph_domain(ref.refined);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(data, WendlandC2{ref.cfg.beta}, domain, ref.cfg.d, ref.cfg.overlap));
  }
}
BENCHMARK(BM_Fit)->Arg(2)->Arg(3);

void BM_Evaluate(benchmark::State& state) {
  const auto& ref = pick(static_cast<int>(state.range(0)));
  const auto domain = graph_domain(ref.refined);
  const auto pu = fit(graph_data(ref.refined), WendlandC2{ref.cfg.beta}, domain, ref.cfg.d, ref.cfg.overlap);
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    Point x(domain.dim());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      x(k) = std::uniform_real_distribution<double>(domain.lower(k), domain.upper(k))(rng);
    }
    benchmark::DoNotOptimize(pu(x));
  }
}
BENCHMARK(BM_Evaluate)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
