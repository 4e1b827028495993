#include <doctest.h>

#include <algorithm>

#include "sepx/config.hpp"
#include "sepx/errors.hpp"
#include "sepx/separatrix.hpp"
#include "test_support.hpp"

using namespace sepx;

namespace {

DetectConfig reference_detect(double gamma) {
  DetectConfig cfg;
  cfg.bisection.tol = 1e-6 * gamma;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("equispaced coordinates include both ends") {
  const auto xs = equispaced(5, 10.0);
  REQUIRE(xs.size() == 5);
  CHECK(xs[0] == 0.0);
  CHECK(xs[1] == 2.5);
  CHECK(xs[4] == 10.0);
}

TEST_CASE("probe counts") {
  CHECK(boundary_probes(2, 12, 10.0).size() == 24);
  CHECK(boundary_probes(3, 10, 10.0).size() == 300);
  CHECK_THROWS_AS(boundary_probes(2, 1, 10.0), ContractError);
  CHECK_THROWS_AS(boundary_probes(4, 3, 10.0), ContractError);
  CHECK_THROWS_AS(boundary_probes(2, 3, 0.0), ContractError);
}

TEST_CASE("n = 2 probes sit on the corners only") {
  for (const auto& pair : boundary_probes(2, 2, 1.0)) {
    for (const State* s : {&pair.low, &pair.high}) {
      for (double v : *s) CHECK((v == 0.0 || v == 1.0));
    }
  }
}

TEST_CASE("probe pairs join opposite faces along their axis") {
  for (int dim : {2, 3}) {
    const auto pairs = boundary_probes(dim, 4, 3.0);
    for (const auto& pair : pairs) {
      const auto k = pair.axis;
      CHECK(pair.low(k) == 0.0);
      CHECK(pair.high(k) == 3.0);
      State diff = pair.high - pair.low;
      diff(k) = 0;
      CHECK(diff.norm() == 0.0);
    }
  }
  const auto p3 = boundary_probes(3, 4, 3.0);
  CHECK(p3[0].axis == 2);
  CHECK(p3[16].axis == 1);
  CHECK(p3[32].axis == 0);
  // outer loop over the first free coordinate
  CHECK(p3[1].low == State{{0.0, 1.0, 0.0}});
  CHECK(p3[4].low == State{{1.0, 0.0, 0.0}});
}

TEST_CASE("bisection config validation") {
  BisectionConfig cfg;
  cfg.tol = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = BisectionConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("segment inside one basin has no crossing") {
  const Model m(sepx::testing::reference_two_pop());
  const auto attractors = m.stable_attractors();
  const ProbePair pair{State{{5.0, 0.0}}, State{{10.0, 0.0}}, 0};
  const auto out = bisect(m, pair, attractors, ClassifierConfig{}, BisectionConfig{});
  CHECK(out.status == BisectStatus::no_crossing);
  CHECK(out.iterations == 0);
}

TEST_CASE("bisected point is bracketed by the two basins") {
  const Model m(sepx::testing::reference_two_pop());
  const auto attractors = m.stable_attractors();
  BisectionConfig bis;
  bis.tol = 1e-5;
  const ProbePair pair{State{{5.0, 0.0}}, State{{5.0, 10.0}}, 1};
  const auto out = bisect(m, pair, attractors, ClassifierConfig{}, bis);
  REQUIRE(out.status == BisectStatus::hit);
  CHECK_FALSE(out.low_confidence);
  CHECK(out.low_attractor != out.high_attractor);
  const State dir{{0.0, 1.0}};
  const auto below = classify(m, out.point - bis.tol * dir, attractors, ClassifierConfig{});
  const auto above = classify(m, out.point + bis.tol * dir, attractors, ClassifierConfig{});
  REQUIRE(below.resolved());
  REQUIRE(above.resolved());
  CHECK(*below.attractor == out.low_attractor);
  CHECK(*above.attractor == out.high_attractor);
}

TEST_CASE("iteration cap flags the point as low confidence") {
  const Model m(sepx::testing::reference_two_pop());
  BisectionConfig bis;
  bis.tol = 1e-12;
  bis.max_iter = 5;
  const ProbePair pair{State{{5.0, 0.0}}, State{{5.0, 10.0}}, 1};
  const auto out = bisect(m, pair, m.stable_attractors(), ClassifierConfig{}, bis);
  CHECK(out.status == BisectStatus::hit);
  CHECK(out.low_confidence);
  CHECK(out.iterations == 5);
}

TEST_CASE("unresolved endpoint skips the probe") {
  const Model m(sepx::testing::symmetric_params());
  ClassifierConfig cls;
  cls.integrator.t_max = 30;
  // (0.5, 0.5) sits on the separatrix
  const ProbePair pair{State{{0.5, 0.5}}, State{{0.5, 2.0}}, 1};
  const auto out = bisect(m, pair, m.stable_attractors(), cls, BisectionConfig{});
  CHECK(out.status == BisectStatus::skipped);
  CHECK_FALSE(out.diagnostic.empty());
}

TEST_CASE("detection needs exactly two attractors") {
  auto params = sepx::testing::reference_two_pop();
  params.b = 1.0;
  CHECK_THROWS_AS(detect(Model(params), 4, 10.0, DetectConfig{}), ConfigError);
}

TEST_CASE("two-species detection count") {
  const Model m(sepx::testing::reference_two_pop());
  const auto result = detect(m, 12, 10.0, reference_detect(10.0));
  CHECK(result.points.size() >= 18);
  CHECK(result.points.size() <= 22);
  // regression fixture
  CHECK(result.points.size() == 21);
  CHECK(result.records.size() == 24);
  CHECK(result.hit_probes.size() == result.points.size());
  CHECK(result.low_confidence_count() == 0);
}

TEST_CASE("literal boundary rule skips the probe through the origin") {
  const Model m(sepx::testing::reference_two_pop());
  auto cfg = reference_detect(10.0);
  cfg.classifier.boundary_settle = BoundarySettle::unresolved;
  const auto result = detect(m, 12, 10.0, cfg);
  CHECK(result.points.size() == 20);
  const auto skipped = std::count_if(result.records.begin(), result.records.end(),
                                     [](const auto& r) { return r.outcome.status == BisectStatus::skipped; });
  CHECK(skipped == 2);
}

TEST_CASE("more probes never lose crossings") {
  const Model m(sepx::testing::reference_two_pop());
  std::size_t previous = 0;
  for (int n : {4, 8, 12}) {
    const auto count = detect(m, n, 10.0, reference_detect(10.0)).points.size();
    CHECK(count >= previous);
    previous = count;
  }
}

TEST_CASE("detection is deterministic across thread counts") {
  const Model m(sepx::testing::reference_two_pop());
  auto serial = reference_detect(10.0);
  serial.threads = 1;
  auto parallel = reference_detect(10.0);
  parallel.threads = 4;
  const auto a = detect(m, 12, 10.0, serial);
  const auto b = detect(m, 12, 10.0, parallel);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) CHECK(a.points.points[k] == b.points.points[k]);
  CHECK(a.hit_probes == b.hit_probes);
}

TEST_CASE("symmetric system: detected points lie on the diagonal") {
  const Model m(sepx::testing::symmetric_params());
  const double gamma = 2.0;
  const auto cfg = reference_detect(gamma);
  const auto result = detect(m, 11, gamma, cfg);
  CHECK(result.points.size() >= 18);
  for (const auto& p : result.points.points) {
    CHECK(std::abs(p(0) - p(1)) < 10 * cfg.bisection.tol);
  }
}

TEST_CASE("three-species detection count") {
  const auto pc = reference_three_pop_config();
  const Model m(pc.params);
  const auto result = detect(m, pc.n, pc.gamma, pc.detect_config());
  CHECK(result.probes.size() == 300);
  CHECK(result.points.size() >= 164);
  CHECK(result.points.size() <= 200);
  // regression fixture
  CHECK(result.points.size() == 182);
  CHECK(result.boundary_equilibria.size() == 3);
}
