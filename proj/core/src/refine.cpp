#include "sepx/refine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "sepx/errors.hpp"

namespace sepx {

namespace {

constexpr double kDuplicateTol = 1e-12;

double column_max(const SeparatrixPointSet& raw, int k) {
  double m = raw.points.front()(k);
  for (const auto& p : raw.points) m = std::max(m, p(k));
  return m;
}

struct Bin {
  State sum;
  std::size_t count = 0;
};

}  // namespace

int bin_index(double v, double max, int bins) {
  if (!(max > 0.0)) return 0;
  const double width = max / bins;
  int l = static_cast<int>(std::floor(v / width));
  l = std::clamp(l, 0, bins - 1);
  // floor() can be off by one against the explicitly computed edges.
  while (l > 0 && v < l * width) --l;
  while (l < bins - 1 && v >= (l + 1) * width) ++l;
  return l;
}

RefinedPointSet refine_2d(const SeparatrixPointSet& raw, int L) {
  if (raw.dim != 2) throw ContractError("refine_2d needs a 2D point set");
  if (raw.points.empty()) throw ContractError("cannot refine an empty point set");
  if (raw.points.size() < 2) throw ContractError("2D refinement needs at least two points");
  if (L < 1) throw ContractError("bin count L must be >= 1");

  RefinedPointSet out;
  out.dim = 2;
  out.raw_count = raw.size();
  out.L = L;
  out.max_x = column_max(raw, 0);

  std::vector<Bin> bins(static_cast<std::size_t>(L), Bin{State::Zero(2), 0});
  for (const auto& p : raw.points) {
    auto& bin = bins[static_cast<std::size_t>(bin_index(p(0), out.max_x, L))];
    bin.sum += p;
    ++bin.count;
  }

  out.points.push_back(raw.points.front());
  for (const auto& bin : bins) {
    if (bin.count == 0) continue;
    out.points.push_back(bin.sum / static_cast<double>(bin.count));
    out.bin_sizes.push_back(bin.count);
  }
  out.K = out.bin_sizes.size();
  out.points.push_back(raw.points.back());
  return out;
}

RefinedPointSet refine_3d(const SeparatrixPointSet& raw, int L, int H) {
  if (raw.dim != 3) throw ContractError("refine_3d needs a 3D point set");
  if (raw.points.empty()) throw ContractError("cannot refine an empty point set");
  if (L < 1 || H < 1) throw ContractError("bin counts L and H must be >= 1");

  RefinedPointSet out;
  out.dim = 3;
  out.raw_count = raw.size();
  out.L = L;
  out.H = H;
  out.max_x = column_max(raw, 0);
  out.max_y = column_max(raw, 1);

  std::map<std::pair<int, int>, Bin> bins;
  for (const auto& p : raw.points) {
    const std::pair key{bin_index(p(0), out.max_x, L), bin_index(p(1), out.max_y, H)};
    auto [it, inserted] = bins.try_emplace(key, Bin{State::Zero(3), 0});
    it->second.sum += p;
    ++it->second.count;
  }
  for (const auto& [key, bin] : bins) {
    out.points.push_back(bin.sum / static_cast<double>(bin.count));
    out.bin_sizes.push_back(bin.count);
  }
  out.K = out.bin_sizes.size();
  return out;
}

RefinedPointSet augment(RefinedPointSet refined, const Equilibrium& saddle) {
  if (refined.augmented) throw ContractError("point set is already augmented");
  if (!saddle.computable || saddle.stability != Stability::saddle) {
    throw ContractError("augmentation requires a saddle equilibrium, got " + saddle.label +
                        " (" + to_string(saddle.stability) + ")");
  }
  if (saddle.location.size() != refined.dim) {
    throw ContractError("saddle dimension does not match the point set");
  }

  const Eigen::Index sites = refined.dim - 1;
  auto append_unique = [&](const State& p) {
    for (const auto& q : refined.points) {
      if ((p.head(sites) - q.head(sites)).lpNorm<Eigen::Infinity>() <= kDuplicateTol) return;
    }
    refined.points.push_back(p);
  };
  append_unique(State::Zero(refined.dim));
  append_unique(saddle.location);
  refined.augmented = true;
  return refined;
}

}  // namespace sepx
