#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sepx/refine.hpp"

namespace sepx {

using Point = Eigen::VectorXd;

/// Wendland C2 function (1 - beta r)_+^4 (4 beta r + 1), support [0, 1/beta].
double wendland_c2(double r, double beta);

struct WendlandC2 {
  double beta = 1.0;

  double operator()(double r) const { return wendland_c2(r, beta); }
  double support_radius() const { return 1.0 / beta; }
};

/// Axis-aligned box in parameter space.
struct Box {
  Point lower;
  Point upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Point& x) const;
};

struct Subdomain {
  Point center;
  double radius = 0.0;
  std::vector<std::size_t> node_indices;
};

/// Overlapping balls on a regular grid of centers over the domain.
struct Covering {
  Box domain;
  double overlap = 1.5;
  std::vector<int> shape;  ///< cells per axis, product == subdomain count
  std::vector<Subdomain> cells;
};

/// Splits d into a per-axis cell count with product d. One axis: {d}. Two
/// axes: the most nearly square factorization, with the larger factor along
/// the longer side of the box.
std::vector<int> grid_shape(int d, const Box& domain);

/// d cells with equispaced centers; radius = overlap * (largest half
/// spacing). Throws CoveringError if the balls cannot cover the box corners.
Covering build_covering(const Box& domain, int d, double overlap);

/// Fills node_indices of every cell with the sites strictly inside it. Throws
/// CoveringError naming the first empty cell.
void assign_nodes(Covering& covering, const Eigen::MatrixXd& sites);

/// Refined separatrix points as a graph: sites are all but the last
/// coordinate, values the last coordinate (y = s(x) or z = s(x,y)).
struct GraphData {
  Eigen::MatrixXd sites;  ///< one row per node
  Eigen::VectorXd values;
};

GraphData graph_data(const RefinedPointSet& refined);

/// Parameter-space box [0, M] or [0, M_x] x [0, M_y] from the refinement.
Box graph_domain(const RefinedPointSet& refined);

/// Partition of unity interpolant sum_j R_j(x) W_j(x), with local Wendland
/// RBF interpolants R_j and Shepard-normalized Wendland bumps W_j.
class PUInterpolant {
 public:
  /// Throws OutOfDomainError where no cell weight is positive.
  double evaluate(const Point& x) const;
  double operator()(const Point& x) const { return evaluate(x); }

  /// Nonzero Shepard weights (cell index, W_j(x)); empty outside the covering.
  std::vector<std::pair<std::size_t, double>> weights(const Point& x) const;

  /// Local interpolant of a single cell.
  double local_value(std::size_t cell, const Point& x) const;

  const WendlandC2& kernel() const { return kernel_; }
  const Covering& covering() const { return covering_; }
  const std::vector<Eigen::VectorXd>& coefficients() const { return coefficients_; }
  const Eigen::MatrixXd& sites() const { return sites_; }
  const Eigen::VectorXd& values() const { return values_; }
  /// Whether a cell needed diagonal jitter to factorize.
  const std::vector<bool>& jittered() const { return jittered_; }

 private:
  friend PUInterpolant fit(const Eigen::MatrixXd&, const Eigen::VectorXd&, const WendlandC2&,
                           Covering);

  WendlandC2 kernel_;
  Covering covering_;
  Eigen::MatrixXd sites_;
  Eigen::VectorXd values_;
  std::vector<Eigen::VectorXd> coefficients_;
  std::vector<bool> jittered_;
};

/// Solves Phi alpha = f per cell by Cholesky. One retry with diagonal jitter
/// 1e-12 * trace/n; throws FitError on failure or a condition estimate above
/// 1e14. Sites must be pairwise distinct within each cell.
PUInterpolant fit(const Eigen::MatrixXd& sites, const Eigen::VectorXd& values,
                  const WendlandC2& kernel, Covering covering);

/// Builds the covering over `domain` and fits.
PUInterpolant fit(const GraphData& data, const WendlandC2& kernel, const Box& domain, int d,
                  double overlap);

/// Sampled fill distance sup_x min_j |x - x_j| over a tensor grid of about
/// probe_count points (odd count per axis so the box center is probed).
double fill_distance(const Eigen::MatrixXd& sites, const Box& domain, int probe_count);

}  // namespace sepx
