#include "sepx/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepx/errors.hpp"

namespace sepx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative size below which a closed-form denominator counts as vanishing.
constexpr double kDegenerateTol = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ContractError(std::string("parameter ") + name + " must be finite and > 0");
  }
}

void require_fraction(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ContractError(std::string("parameter ") + name + " must lie in [0,1]");
  }
}

bool degenerate(double denominator, double scale) {
  return std::abs(denominator) <= kDegenerateTol * std::max(1.0, std::abs(scale));
}

State make_state(std::initializer_list<double> values) {
  State s(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) s(i++) = v;
  return s;
}

bool is_feasible(const State& x) {
  return x.allFinite() && (x.array() >= 0.0).all();
}

}  // namespace

void TwoPopParams::validate() const {
  require_positive(p, "p");
  require_positive(r, "r");
  require_positive(a, "a");
  require_positive(c, "c");
  require_positive(u, "u");
  require_positive(z, "z");
  require_fraction(b, "b");
}

void ThreePopParams::validate() const {
  require_positive(p, "p");
  require_positive(q, "q");
  require_positive(r, "r");
  require_positive(a, "a");
  require_positive(c, "c");
  require_positive(f, "f");
  require_positive(g, "g");
  require_positive(u, "u");
  require_positive(v, "v");
  require_positive(z, "z");
  require_fraction(b, "b");
  require_fraction(e, "e");
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::saddle: return "saddle";
    case Stability::non_hyperbolic: return "non-hyperbolic";
  }
  return "unknown";
}

Stability classify_spectrum(const std::vector<std::complex<double>>& eigenvalues) {
  bool any_neg = false;
  bool any_pos = false;
  for (const auto& l : eigenvalues) {
    if (std::abs(l.real()) < 1e-9 * std::max(1.0, std::abs(l))) {
      return Stability::non_hyperbolic;
    }
    (l.real() < 0.0 ? any_neg : any_pos) = true;
  }
  if (any_neg && any_pos) return Stability::saddle;
  return any_pos ? Stability::unstable : Stability::stable;
}

Model::Model(TwoPopParams params) : params_(params), dim_(2) { params.validate(); }
Model::Model(ThreePopParams params) : params_(params), dim_(3) { params.validate(); }
Model::Model(const ModelParams& params)
    : Model(std::holds_alternative<TwoPopParams>(params)
                ? Model(std::get<TwoPopParams>(params))
                : Model(std::get<ThreePopParams>(params))) {}

void Model::rhs_into(const double* x, double* dxdt) const {
  if (const auto* m = std::get_if<TwoPopParams>(&params_)) {
    const double N = x[0], E = x[1];
    dxdt[0] = m->p * (1.0 - N / m->u) * N - m->a * E * (1.0 - m->b) * N;
    dxdt[1] = m->r * (1.0 - E / m->z) * E - m->c * N * (1.0 - m->b) * E;
    return;
  }
  const auto& m = std::get<ThreePopParams>(params_);
  const double N = x[0], A = x[1], E = x[2];
  dxdt[0] = m.p * (1.0 - N / m.u) * N - m.a * E * (1.0 - m.b) * N;
  dxdt[1] = m.q * (1.0 - A / m.v) * A - m.c * E * (1.0 - m.e) * A;
  dxdt[2] = m.r * (1.0 - E / m.z) * E - m.f * N * (1.0 - m.b) * E -
            m.g * A * (1.0 - m.e) * E;
}

State Model::rhs(const State& x) const {
  if (x.size() != dim_) {
    throw ContractError("state dimension " + std::to_string(x.size()) +
                        " does not match model dimension " + std::to_string(dim_));
  }
  State out(dim_);
  rhs_into(x.data(), out.data());
  return out;
}

Matrix Model::jacobian(const State& x) const {
  if (x.size() != dim_) {
    throw ContractError("state dimension " + std::to_string(x.size()) +
                        " does not match model dimension " + std::to_string(dim_));
  }
  Matrix J = Matrix::Zero(dim_, dim_);
  if (const auto* m = std::get_if<TwoPopParams>(&params_)) {
    const double N = x(0), E = x(1), s = 1.0 - m->b;
    J(0, 0) = m->p * (1.0 - 2.0 * N / m->u) - m->a * E * s;
    J(0, 1) = -m->a * s * N;
    J(1, 0) = -m->c * s * E;
    J(1, 1) = m->r * (1.0 - 2.0 * E / m->z) - m->c * N * s;
    return J;
  }
  const auto& m = std::get<ThreePopParams>(params_);
  const double N = x(0), A = x(1), E = x(2);
  const double sb = 1.0 - m.b, se = 1.0 - m.e;
  J(0, 0) = m.p * (1.0 - 2.0 * N / m.u) - m.a * E * sb;
  J(0, 2) = -m.a * sb * N;
  J(1, 1) = m.q * (1.0 - 2.0 * A / m.v) - m.c * E * se;
  J(1, 2) = -m.c * se * A;
  J(2, 0) = -m.f * sb * E;
  J(2, 1) = -m.g * se * E;
  J(2, 2) = m.r * (1.0 - 2.0 * E / m.z) - m.f * N * sb - m.g * A * se;
  return J;
}

std::vector<Equilibrium> Model::equilibria() const {
  std::vector<Equilibrium> out;
  auto push = [&](std::string label, State loc, bool computable) {
    Equilibrium eq;
    eq.label = std::move(label);
    eq.location = std::move(loc);
    eq.computable = computable;
    if (!computable) {
      eq.feasible = false;
      eq.stability = Stability::non_hyperbolic;
      out.push_back(std::move(eq));
      return;
    }
    eq.feasible = is_feasible(eq.location);
    Eigen::EigenSolver<Matrix> solver(jacobian(eq.location), false);
    const auto& ev = solver.eigenvalues();
    eq.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(eq.eigenvalues.begin(), eq.eigenvalues.end(),
              [](const auto& l, const auto& r) {
                return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
              });
    eq.stability = classify_spectrum(eq.eigenvalues);
    out.push_back(std::move(eq));
  };

  if (const auto* m = std::get_if<TwoPopParams>(&params_)) {
    const auto [p, r, a, c, u, z, b] = *m;
    const double s = 1.0 - b;
    push("E0", make_state({0.0, 0.0}), true);
    push("E1", make_state({0.0, z}), true);
    push("E2", make_state({u, 0.0}), true);
    const double den = p * r - a * u * c * z * s * s;
    if (degenerate(den, std::max(p * r, a * u * c * z * s * s))) {
      push("E3", make_state({kNaN, kNaN}), false);
    } else {
      push("E3",
           make_state({u * r * (p - a * z * s) / den, z * p * (r - c * u * s) / den}),
           true);
    }
    return out;
  }

  const auto& m = std::get<ThreePopParams>(params_);
  const double p = m.p, q = m.q, r = m.r, a = m.a, c = m.c, f = m.f, g = m.g;
  const double u = m.u, v = m.v, z = m.z;
  const double sb = 1.0 - m.b, se = 1.0 - m.e;

  push("E0", make_state({0.0, 0.0, 0.0}), true);
  push("E1", make_state({u, 0.0, 0.0}), true);
  push("E2", make_state({0.0, v, 0.0}), true);
  push("E3", make_state({u, v, 0.0}), true);
  push("E4", make_state({0.0, 0.0, z}), true);

  const double den5 = a * z * u * f * sb * sb - p * r;
  if (degenerate(den5, std::max(p * r, a * z * u * f * sb * sb))) {
    push("E5", make_state({kNaN, 0.0, kNaN}), false);
  } else {
    push("E5",
         make_state({u * r * (a * z * sb - p) / den5, 0.0,
                     z * p * (f * u * sb - r) / den5}),
         true);
  }

  const double den6 = c * z * v * g * se * se - q * r;
  if (degenerate(den6, std::max(q * r, c * z * v * g * se * se))) {
    push("E6", make_state({0.0, kNaN, kNaN}), false);
  } else {
    push("E6",
         make_state({0.0, v * r * (c * z * se - q) / den6,
                     z * q * (v * g * se - r) / den6}),
         true);
  }

  const double alpha = p * c * z * v * g * se * se;
  const double beta = a * z * u * f * q * sb * sb;
  const double den7 = alpha + beta - p * r * q;
  if (degenerate(den7, std::max({alpha, beta, p * r * q}))) {
    push("E7", make_state({kNaN, kNaN, kNaN}), false);
  } else {
    push("E7",
         make_state({u * (alpha - p * r * q - z * a * q * sb * (v * g * se - r)) / den7,
                     v * (beta - p * r * q - p * c * z * se * (f * u * sb - r)) / den7,
                     z * p * q * (f * u * sb + v * g * se - r) / den7}),
         true);
  }
  return out;
}

std::vector<TableRow> Model::table_conditions() const {
  std::vector<TableRow> rows;
  if (const auto* m = std::get_if<TwoPopParams>(&params_)) {
    const auto [p, r, a, c, u, z, b] = *m;
    const double az = a * z * (1.0 - b);
    const double cu = c * u * (1.0 - b);
    rows.push_back({"E0", true, false});
    rows.push_back({"E1", true, p < az});
    rows.push_back({"E2", true, r < cu});
    rows.push_back({"E3", (p > az && r > cu) || (p < az && r < cu), r > cu && p > az});
    return rows;
  }
  const auto& m = std::get<ThreePopParams>(params_);
  const double p = m.p, q = m.q, r = m.r;
  const double sb = 1.0 - m.b, se = 1.0 - m.e;
  const double az = m.a * m.z * sb;
  const double fu = m.f * m.u * sb;
  const double cz = m.c * m.z * se;
  const double vg = m.v * m.g * se;
  rows.push_back({"E0", true, false});
  rows.push_back({"E1", true, false});
  rows.push_back({"E2", true, false});
  rows.push_back({"E3", true, r < fu + vg});
  rows.push_back({"E4", true, q < cz && p < az});
  rows.push_back({"E5", (r > fu && p > az) || (r < fu && p < az),
                  r > fu && p > az &&
                      m.c * se * m.z * p * (fu - r) <
                          q * (m.a * m.z * m.u * m.f * sb * sb - p * r)});
  rows.push_back({"E6", (q > cz && r > vg) || (q < cz && r < vg),
                  q > cz && r > vg &&
                      m.a * sb * m.z * q * (vg - r) <
                          p * (m.c * m.z * m.v * m.g * se * se - q * r)});
  rows.push_back({"E7", std::nullopt, std::nullopt});
  return rows;
}

std::vector<Equilibrium> Model::stable_attractors() const {
  std::vector<Equilibrium> out;
  for (auto& eq : equilibria()) {
    if (eq.computable && eq.feasible && eq.stability == Stability::stable) {
      out.push_back(std::move(eq));
    }
  }
  return out;
}

std::vector<Equilibrium> Model::boundary_equilibria() const {
  std::vector<Equilibrium> out;
  for (auto& eq : equilibria()) {
    if (eq.computable && eq.feasible && eq.stability != Stability::stable &&
        (eq.location.array() == 0.0).any()) {
      out.push_back(std::move(eq));
    }
  }
  return out;
}

std::optional<Equilibrium> Model::interior_saddle() const {
  auto all = equilibria();
  auto& interior = all.back();
  if (interior.computable && interior.feasible && interior.stability == Stability::saddle) {
    return interior;
  }
  return std::nullopt;
}

}  // namespace sepx
