#include <doctest.h>

#include <cmath>
#include <random>

#include "sepx/errors.hpp"
#include "sepx/refine.hpp"
#include "test_support.hpp"

using namespace sepx;

namespace {

SeparatrixPointSet make_set(int dim, std::vector<State> points) {
  SeparatrixPointSet s;
  s.dim = dim;
  s.points = std::move(points);
  return s;
}

SeparatrixPointSet random_set(std::mt19937_64& rng, int dim, int count) {
  std::uniform_real_distribution<double> x(0.0, 10.0);
  std::vector<State> pts;
  for (int k = 0; k < count; ++k) {
    State p(dim);
    for (auto& v : p) v = x(rng);
    pts.push_back(p);
  }
  return make_set(dim, pts);
}

Equilibrium reference_saddle() {
  return *Model(sepx::testing::reference_two_pop()).interior_saddle();
}

}  // namespace

TEST_CASE("bin index is half open with a closed last bin") {
  CHECK(bin_index(0.0, 3.0, 2) == 0);
  CHECK(bin_index(1.4999, 3.0, 2) == 0);
  CHECK(bin_index(1.5, 3.0, 2) == 1);
  CHECK(bin_index(3.0, 3.0, 2) == 1);
  CHECK(bin_index(0.0, 0.0, 5) == 0);
  // agrees with the explicitly computed edges near every boundary
  for (int L : {3, 7, 10, 13}) {
    const double M = 0.9;
    const double width = M / L;
    for (int l = 1; l < L; ++l) {
      for (double v : {std::nextafter(l * width, 0.0), l * width, std::nextafter(l * width, 1.0)}) {
        const int k = bin_index(v, M, L);
        CHECK(v >= k * width);
        CHECK(v < (k + 1) * width);
      }
    }
  }
}

TEST_CASE("diagonal example with two bins") {
  const auto raw = make_set(2, {State{{0.0, 0.0}}, State{{1.0, 1.0}}, State{{2.0, 2.0}},
                                State{{3.0, 3.0}}});
  const auto r = refine_2d(raw, 2);
  REQUIRE(r.size() == 4);
  CHECK(r.points[0] == State{{0.0, 0.0}});
  CHECK(r.points[1] == State{{0.5, 0.5}});
  CHECK(r.points[2] == State{{2.5, 2.5}});
  CHECK(r.points[3] == State{{3.0, 3.0}});
  CHECK(r.K == 2);
  CHECK(r.max_x == 3.0);
  CHECK(r.bin_sizes == std::vector<std::size_t>{2, 2});
}

TEST_CASE("identical points collapse to one bin") {
  const State p{{2.0, 5.0}};
  const auto r = refine_2d(make_set(2, {p, p, p}), 4);
  CHECK(r.K == 1);
  REQUIRE(r.size() == 3);
  for (const auto& q : r.points) CHECK(q == p);
}

TEST_CASE("empty leading bins are skipped") {
  const auto r = refine_2d(make_set(2, {State{{8.0, 1.0}}, State{{9.0, 2.0}}, State{{10.0, 3.0}}}), 10);
  // 10 sits on the closed right edge of the bin holding 9
  CHECK(r.K == 2);
  CHECK(r.size() == 4);
}

TEST_CASE("refine input errors") {
  CHECK_THROWS_AS(refine_2d(make_set(2, {}), 3), ContractError);
  CHECK_THROWS_AS(refine_2d(make_set(2, {State{{1.0, 1.0}}}), 3), ContractError);
  CHECK_THROWS_AS(refine_2d(make_set(2, {State{{1.0, 1.0}}, State{{2.0, 1.0}}}), 0), ContractError);
  CHECK_THROWS_AS(refine_3d(make_set(3, {}), 2, 2), ContractError);
  CHECK_THROWS_AS(refine_3d(make_set(2, {State{{1.0, 1.0}}}), 2, 2), ContractError);
}

TEST_CASE("single 3D point refines to itself") {
  const State p{{1.0, 2.0, 3.0}};
  const auto r = refine_3d(make_set(3, {p}), 13, 13);
  CHECK(r.K == 1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0] == p);
}

TEST_CASE("square corners average to the centroid") {
  const auto raw = make_set(3, {State{{0.0, 0.0, 1.0}}, State{{2.0, 0.0, 2.0}},
                                State{{0.0, 2.0, 3.0}}, State{{2.0, 2.0, 4.0}}});
  const auto r = refine_3d(raw, 1, 1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0] == State{{1.0, 1.0, 2.5}});
}

TEST_CASE("3D bins are ordered lexicographically") {
  const auto raw = make_set(3, {State{{9.0, 1.0, 0.0}}, State{{1.0, 9.0, 0.0}},
                                State{{1.0, 1.0, 0.0}}, State{{10.0, 10.0, 0.0}}});
  const auto r = refine_3d(raw, 2, 2);
  REQUIRE(r.K == 4);
  CHECK(r.points[0](0) == 1.0);
  CHECK(r.points[0](1) == 1.0);
  CHECK(r.points[1](1) == 9.0);
  CHECK(r.points[2](0) == 9.0);
  CHECK(r.points[3](0) == 10.0);
}

TEST_CASE("bin means conserve mass and stay inside their bins") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    for (int dim : {2, 3}) {
      const auto raw = random_set(rng, dim, 60);
      const auto r = dim == 2 ? refine_2d(raw, 7) : refine_3d(raw, 5, 4);
      const std::size_t offset = dim == 2 ? 1 : 0;
      State mass = State::Zero(dim);
      State raw_mass = State::Zero(dim);
      for (const auto& p : raw.points) raw_mass += p;
      for (std::size_t k = 0; k < r.K; ++k) mass += r.points[offset + k] * static_cast<double>(r.bin_sizes[k]);
      CHECK((mass - raw_mass).lpNorm<Eigen::Infinity>() < 1e-12 * raw_mass.lpNorm<Eigen::Infinity>());

      if (dim == 2) {
        CHECK(r.K <= 7u);
        for (std::size_t k = 1; k < r.K; ++k) CHECK(r.points[offset + k](0) > r.points[offset + k - 1](0));
        for (std::size_t k = 0; k < r.K; ++k) {
          const State& mean = r.points[offset + k];
          const int bin = bin_index(mean(0), r.max_x, r.L);
          State lo = State::Constant(2, 1e300), hi = State::Constant(2, -1e300);
          for (const auto& p : raw.points) {
            if (bin_index(p(0), r.max_x, r.L) != bin) continue;
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
          }
          CHECK((mean.array() >= lo.array() - 1e-12).all());
          CHECK((mean.array() <= hi.array() + 1e-12).all());
        }
      } else {
        CHECK(r.K <= 20u);
      }
    }
  }
}

TEST_CASE("augment appends origin and saddle once") {
  const auto raw = make_set(2, {State{{1.0, 2.0}}, State{{5.0, 4.0}}, State{{9.0, 8.0}}});
  const auto refined = refine_2d(raw, 2);
  const auto aug = augment(refined, reference_saddle());
  CHECK(aug.augmented);
  REQUIRE(aug.size() == refined.size() + 2);
  CHECK(aug.points[aug.size() - 2] == State{{0.0, 0.0}});
  CHECK((aug.points.back() - State{{0.4, 1.2}}).norm() < 1e-12);
  CHECK_THROWS_AS(augment(aug, reference_saddle()), ContractError);
}

TEST_CASE("augment drops rows whose site already exists") {
  const auto raw = make_set(2, {State{{0.0, 4.8e-6}}, State{{5.0, 4.0}}, State{{9.0, 8.0}}});
  const auto aug = augment(refine_2d(raw, 2), reference_saddle());
  // origin shares the site x = 0 with the first raw point
  CHECK(aug.size() == refine_2d(raw, 2).size() + 1);
}

TEST_CASE("augment needs a saddle") {
  const auto refined = refine_2d(make_set(2, {State{{1.0, 2.0}}, State{{5.0, 4.0}}}), 2);
  const auto eqs = Model(sepx::testing::reference_two_pop()).equilibria();
  CHECK_THROWS_AS(augment(refined, sepx::testing::find(eqs, "E1")), ContractError);
  const auto e7 = *Model(sepx::testing::reference_three_pop()).interior_saddle();
  CHECK_THROWS_AS(augment(refined, e7), ContractError);
}

TEST_CASE("3D augmentation appends the interior saddle") {
  const auto raw = make_set(3, {State{{1.0, 2.0, 3.0}}, State{{5.0, 4.0, 1.0}}});
  const auto e7 = *Model(sepx::testing::reference_three_pop()).interior_saddle();
  const auto aug = augment(refine_3d(raw, 2, 2), e7);
  REQUIRE(aug.size() == 4);
  CHECK(aug.points[2] == State::Zero(3));
  CHECK(aug.points[3] == e7.location);
}
