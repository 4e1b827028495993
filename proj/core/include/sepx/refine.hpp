#pragma once

#include <cstddef>
#include <vector>

#include "sepx/models.hpp"
#include "sepx/separatrix.hpp"

namespace sepx {

/// Bin-averaged separatrix points.
///
/// 2D rows: first raw point, one mean per nonempty bin (bin order), last raw
/// point. 3D rows: one mean per nonempty (l,h) bin in lexicographic order.
/// After augment() the origin and the saddle follow, minus duplicate sites.
struct RefinedPointSet {
  int dim = 2;
  std::vector<State> points;
  std::size_t raw_count = 0;  ///< N
  int L = 0;
  int H = 0;                  ///< 0 in 2D
  std::size_t K = 0;          ///< nonempty bins
  double max_x = 0.0;         ///< M (2D) or M_x (3D)
  double max_y = 0.0;         ///< M_y (3D only)
  bool augmented = false;
  std::vector<std::size_t> bin_sizes;  ///< cardinality of each nonempty bin

  std::size_t size() const { return points.size(); }
};

/// Index of the half-open bin [l*M/L, (l+1)*M/L) containing v; the last bin
/// is closed on the right. Values at or above M land in bin L-1.
int bin_index(double v, double max, int bins);

RefinedPointSet refine_2d(const SeparatrixPointSet& raw, int L);
RefinedPointSet refine_3d(const SeparatrixPointSet& raw, int L, int H);

/// Appends the origin and the saddle location. A new row is dropped when its
/// graph site (all but the last coordinate) matches an existing row's within
/// 1e-12, since a repeated site makes the interpolation system singular.
/// Throws ContractError if already augmented or if `saddle` is not a saddle.
RefinedPointSet augment(RefinedPointSet refined, const Equilibrium& saddle);

}  // namespace sepx
