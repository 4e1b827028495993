#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace sepx {

using State = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Two competing populations N (native, partly sheltered in a niche) and E
/// (exotic).
///
///   dN/dt = p (1 - N/u) N - a E (1-b) N
///   dE/dt = r (1 - E/z) E - c N (1-b) E
struct TwoPopParams {
  double p = 0.0;  ///< growth rate of N
  double r = 0.0;  ///< growth rate of E
  double a = 0.0;  ///< competition of E on N
  double c = 0.0;  ///< competition of N on E
  double u = 0.0;  ///< carrying capacity of N
  double z = 0.0;  ///< carrying capacity of E
  double b = 0.0;  ///< niche fraction of N, in [0,1]

  /// Throws ContractError unless all rates/capacities are positive and b in [0,1].
  void validate() const;
  bool operator==(const TwoPopParams&) const = default;
};

/// Three populations N, A (two sheltered natives that do not compete with each
/// other) and E (exotic).
///
///   dN/dt = p (1 - N/u) N - a E (1-b) N
///   dA/dt = q (1 - A/v) A - c E (1-e) A
///   dE/dt = r (1 - E/z) E - f N (1-b) E - g A (1-e) E
struct ThreePopParams {
  double p = 0.0, q = 0.0, r = 0.0;
  double a = 0.0, c = 0.0, f = 0.0, g = 0.0;
  double u = 0.0, v = 0.0, z = 0.0;
  double b = 0.0, e = 0.0;

  void validate() const;
  bool operator==(const ThreePopParams&) const = default;
};

using ModelParams = std::variant<TwoPopParams, ThreePopParams>;

enum class Stability { stable, unstable, saddle, non_hyperbolic };

std::string to_string(Stability s);

struct Equilibrium {
  std::string label;  ///< "E0" ... "E7"
  State location;
  /// False when the closed form has a (near) vanishing denominator; location is
  /// then NaN and the point is excluded from attractor and saddle queries.
  bool computable = true;
  bool feasible = false;
  Stability stability = Stability::unstable;
  std::vector<std::complex<double>> eigenvalues;
};

/// Literal evaluation of the closed-form feasibility/stability inequalities.
/// A field is empty where no closed-form row exists (interior 3D point).
struct TableRow {
  std::string label;
  std::optional<bool> feasible;
  std::optional<bool> stable;
};

/// Classifies a spectrum; |Re l| < 1e-9 * max(1, |l|) counts as zero.
Stability classify_spectrum(const std::vector<std::complex<double>>& eigenvalues);

class Model {
 public:
  explicit Model(TwoPopParams params);
  explicit Model(ThreePopParams params);
  explicit Model(const ModelParams& params);

  int dim() const { return dim_; }
  const ModelParams& params() const { return params_; }

  State rhs(const State& x) const;
  /// rhs without the dimension check or allocation; used by the integrator.
  void rhs_into(const double* x, double* dxdt) const;
  Matrix jacobian(const State& x) const;

  /// All closed-form equilibria (4 in 2D, 8 in 3D) with feasibility and
  /// eigenvalue-based stability filled in.
  std::vector<Equilibrium> equilibria() const;
  std::vector<TableRow> table_conditions() const;

  /// Feasible, computable, stable equilibria.
  std::vector<Equilibrium> stable_attractors() const;
  /// Feasible, computable, non-stable equilibria with a zero coordinate.
  std::vector<Equilibrium> boundary_equilibria() const;
  /// The interior equilibrium (E3 in 2D, E7 in 3D) if it is computable and a
  /// saddle.
  std::optional<Equilibrium> interior_saddle() const;

 private:
  ModelParams params_;
  int dim_;
};

}  // namespace sepx
