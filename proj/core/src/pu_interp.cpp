#include "sepx/pu_interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sepx/errors.hpp"

namespace sepx {

namespace {

constexpr double kMaxCondition = 1e14;
constexpr double kJitter = 1e-12;

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& sites, const std::vector<std::size_t>& idx,
                              const WendlandC2& kernel) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i, i) = kernel(0.0);
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const double r = (sites.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)])) -
                        sites.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(k)])))
                           .norm();
      phi(i, k) = phi(k, i) = kernel(r);
    }
  }
  return phi;
}

}  // namespace

double wendland_c2(double r, double beta) {
  const double s = beta * r;
  if (s >= 1.0) return 0.0;
  const double t = 1.0 - s;
  const double t2 = t * t;
  return t2 * t2 * (4.0 * s + 1.0);
}

bool Box::contains(const Point& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

std::vector<int> grid_shape(int d, const Box& domain) {
  if (d < 1) throw ContractError("subdomain count d must be >= 1");
  if (domain.dim() == 1) return {d};
  if (domain.dim() != 2) throw ContractError("coverings support 1 or 2 parameter dimensions");
  int small = 1;
  for (int f = 1; f * f <= d; ++f) {
    if (d % f == 0) small = f;
  }
  const int large = d / small;
  const Point extent = domain.upper - domain.lower;
  return extent(0) >= extent(1) ? std::vector<int>{large, small} : std::vector<int>{small, large};
}

Covering build_covering(const Box& domain, int d, double overlap) {
  if (!(overlap > 1.0)) throw ContractError("covering overlap must be > 1");
  if (domain.lower.size() != domain.upper.size() || domain.dim() < 1) {
    throw ContractError("malformed covering domain");
  }
  if ((domain.upper.array() < domain.lower.array()).any()) {
    throw ContractError("covering domain has negative extent");
  }

  Covering cov;
  cov.domain = domain;
  cov.overlap = overlap;
  cov.shape = grid_shape(d, domain);

  const int m = domain.dim();
  Point spacing(m);
  for (int k = 0; k < m; ++k) {
    spacing(k) = (domain.upper(k) - domain.lower(k)) / cov.shape[static_cast<std::size_t>(k)];
  }
  const double radius = overlap * 0.5 * spacing.maxCoeff();
  if (!(radius > 0.0)) throw CoveringError("covering domain is degenerate (zero extent)");
  if (0.5 * spacing.norm() >= radius) {
    throw CoveringError("overlap " + std::to_string(overlap) +
                        " too small for the cells to cover the domain");
  }

  std::vector<int> counter(static_cast<std::size_t>(m), 0);
  for (int cell = 0; cell < d; ++cell) {
    Subdomain sub;
    sub.center.resize(m);
    for (int k = 0; k < m; ++k) {
      sub.center(k) = domain.lower(k) + (counter[static_cast<std::size_t>(k)] + 0.5) * spacing(k);
    }
    sub.radius = radius;
    cov.cells.push_back(std::move(sub));
    // Last axis varies fastest.
    for (int k = m - 1; k >= 0; --k) {
      if (++counter[static_cast<std::size_t>(k)] < cov.shape[static_cast<std::size_t>(k)]) break;
      counter[static_cast<std::size_t>(k)] = 0;
    }
  }
  return cov;
}

void assign_nodes(Covering& covering, const Eigen::MatrixXd& sites) {
  for (std::size_t j = 0; j < covering.cells.size(); ++j) {
    auto& cell = covering.cells[j];
    cell.node_indices.clear();
    for (Eigen::Index i = 0; i < sites.rows(); ++i) {
      if ((sites.row(i).transpose() - cell.center).norm() < cell.radius) {
        cell.node_indices.push_back(static_cast<std::size_t>(i));
      }
    }
    if (cell.node_indices.empty()) {
      throw CoveringError("subdomain " + std::to_string(j) +
                          " contains no nodes; increase the overlap or decrease d");
    }
  }
}

GraphData graph_data(const RefinedPointSet& refined) {
  const auto n = static_cast<Eigen::Index>(refined.points.size());
  const int m = refined.dim - 1;
  GraphData g{Eigen::MatrixXd(n, m), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = refined.points[static_cast<std::size_t>(i)];
    g.sites.row(i) = p.head(m).transpose();
    g.values(i) = p(m);
  }
  return g;
}

Box graph_domain(const RefinedPointSet& refined) {
  if (refined.dim == 2) return {Point::Zero(1), Point::Constant(1, refined.max_x)};
  return {Point::Zero(2), Point{{refined.max_x, refined.max_y}}};
}

PUInterpolant fit(const Eigen::MatrixXd& sites, const Eigen::VectorXd& values,
                  const WendlandC2& kernel, Covering covering) {
  if (!(kernel.beta > 0.0)) throw ContractError("shape parameter beta must be > 0");
  if (sites.rows() != values.size()) throw ContractError("site/value count mismatch");
  if (sites.cols() != covering.domain.dim()) {
    throw ContractError("site dimension does not match the covering");
  }
  assign_nodes(covering, sites);

  PUInterpolant out;
  out.kernel_ = kernel;
  out.sites_ = sites;
  out.values_ = values;
  out.coefficients_.resize(covering.cells.size());
  out.jittered_.assign(covering.cells.size(), false);

  for (std::size_t j = 0; j < covering.cells.size(); ++j) {
    const auto& idx = covering.cells[j].node_indices;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if ((sites.row(static_cast<Eigen::Index>(idx[a])) -
             sites.row(static_cast<Eigen::Index>(idx[b])))
                .norm() == 0.0) {
          throw FitError("subdomain " + std::to_string(j) + " has coincident nodes " +
                         std::to_string(idx[a]) + " and " + std::to_string(idx[b]));
        }
      }
    }

    Eigen::MatrixXd phi = kernel_matrix(sites, idx, kernel);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      rhs(static_cast<Eigen::Index>(i)) = values(static_cast<Eigen::Index>(idx[i]));
    }

    Eigen::LLT<Eigen::MatrixXd> llt(phi);
    if (llt.info() != Eigen::Success) {
      phi.diagonal().array() += kJitter * phi.trace() / static_cast<double>(phi.rows());
      llt.compute(phi);
      out.jittered_[j] = true;
      if (llt.info() != Eigen::Success) {
        throw FitError("subdomain " + std::to_string(j) +
                       ": kernel matrix not positive definite; adjust beta");
      }
    }
    const double rcond = llt.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
      throw FitError("subdomain " + std::to_string(j) + ": kernel matrix condition estimate " +
                     std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) +
                     " exceeds 1e14; increase beta");
    }
    out.coefficients_[j] = llt.solve(rhs);
  }
  out.covering_ = std::move(covering);
  return out;
}

PUInterpolant fit(const GraphData& data, const WendlandC2& kernel, const Box& domain, int d,
                  double overlap) {
  return fit(data.sites, data.values, kernel, build_covering(domain, d, overlap));
}

std::vector<std::pair<std::size_t, double>> PUInterpolant::weights(const Point& x) const {
  std::vector<std::pair<std::size_t, double>> w;
  double total = 0.0;
  for (std::size_t j = 0; j < covering_.cells.size(); ++j) {
    const auto& cell = covering_.cells[j];
    const double psi = wendland_c2((x - cell.center).norm(), 1.0 / cell.radius);
    if (psi > 0.0) {
      w.emplace_back(j, psi);
      total += psi;
    }
  }
  for (auto& [j, value] : w) value /= total;
  return w;
}

double PUInterpolant::local_value(std::size_t cell, const Point& x) const {
  const auto& idx = covering_.cells.at(cell).node_indices;
  const auto& alpha = coefficients_[cell];
  double s = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double r = (sites_.row(static_cast<Eigen::Index>(idx[i])).transpose() - x).norm();
    s += alpha(static_cast<Eigen::Index>(i)) * kernel_(r);
  }
  return s;
}

double PUInterpolant::evaluate(const Point& x) const {
  if (x.size() != sites_.cols()) throw ContractError("query point has the wrong dimension");
  const auto w = weights(x);
  if (w.empty()) throw OutOfDomainError("query point lies outside every subdomain");
  double s = 0.0;
  for (const auto& [j, weight] : w) s += weight * local_value(j, x);
  return s;
}

double fill_distance(const Eigen::MatrixXd& sites, const Box& domain, int probe_count) {
  if (probe_count < 100) throw ContractError("fill distance needs at least 100 probes");
  if (sites.rows() == 0) throw ContractError("fill distance needs at least one site");
  const int m = domain.dim();
  int per_axis = static_cast<int>(std::ceil(std::pow(static_cast<double>(probe_count), 1.0 / m)));
  per_axis |= 1;

  std::vector<int> counter(static_cast<std::size_t>(m), 0);
  Point x(m);
  double worst = 0.0;
  for (;;) {
    for (int k = 0; k < m; ++k) {
      x(k) = domain.lower(k) +
             (domain.upper(k) - domain.lower(k)) * counter[static_cast<std::size_t>(k)] /
                 (per_axis - 1);
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sites.rows(); ++i) {
      nearest = std::min(nearest, (sites.row(i).transpose() - x).norm());
    }
    worst = std::max(worst, nearest);

    int k = m - 1;
    for (; k >= 0; --k) {
      if (++counter[static_cast<std::size_t>(k)] < per_axis) break;
      counter[static_cast<std::size_t>(k)] = 0;
    }
    if (k < 0) break;
  }
  return worst;
}

}  // namespace sepx
