#ifndef CLOCKWORK_OSCILLATOR_MANIFOLD_HPP
#define CLOCKWORK_OSCILLATOR_MANIFOLD_HPP

#include <array>
#include <cmath>
#include <string>

#include <json.hpp>

#include "clockwork/error.hpp"
#include "clockwork/oscillator/geometry.hpp"

namespace clockwork::osc {

struct UV {
  double u = 0.0;
  double v = 0.0;
};

/// Nonnegative solution of eps1 (p - u) = u v = eps1 (x - v), i.e. the roots of
///   u^2 - (p - x - eps1) u - eps1 p = 0,   v^2 + (p - x + eps1) v - eps1 x = 0.
/// Each root is evaluated in the form that avoids cancellation.
inline UV manifold_uv_exact(double x, double p, double eps1) {
  if (x < 0.0 || !(p > 0.0) || !(eps1 > 0.0))
    throw InputError("manifold_uv_exact needs x >= 0, p > 0, eps1 > 0");
  const double a = p - x - eps1;
  const double ra = std::sqrt(a * a + 4.0 * eps1 * p);
  const double u = a >= 0.0 ? 0.5 * (a + ra) : 2.0 * eps1 * p / (ra - a);
  const double b = p - x + eps1;
  const double rb = std::sqrt(b * b + 4.0 * eps1 * x);
  const double v = b <= 0.0 ? 0.5 * (rb - b) : 2.0 * eps1 * x / (rb + b);
  return {u, v};
}

/// Leading-order manifold: (0, x - p) above p, (p - x, 0) below.
inline UV manifold_uv_approx(double x, double p) {
  if (x == p)
    throw InputError("approximation undefined at x == p; use manifold_uv_exact");
  return x > p ? UV{0.0, x - p} : UV{p - x, 0.0};
}

/// The two residuals eps1 (p - u) - u v and eps1 (x - v) - u v.
inline std::array<double, 2> manifold_residuals(double x, double u, double v, double p, double eps1) {
  return {eps1 * (p - u) - u * v, eps1 * (x - v) - u * v};
}

/// Eigenvalues of the fast (u, v) Jacobian on the critical manifold.
inline std::array<double, 2> fast_eigenvalues(double u, double v, double eta1, double eps1) {
  return {-eta1, -eta1 - eta1 * (u + v) / eps1};
}

enum class EquilibriumKind { Stable, Oscillatory, FoldDegenerate };

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
  case EquilibriumKind::Stable:
    return "stable";
  case EquilibriumKind::Oscillatory:
    return "oscillatory";
  case EquilibriumKind::FoldDegenerate:
    return "fold-degenerate";
  }
  return "?";
}

struct EquilibriumCharacter {
  EquilibriumKind kind;
  double x;
  double y;
};

/// Position of (ell, phi(ell)) relative to the folds decides the regime.
inline EquilibriumCharacter equilibrium_character(double ell, const CubicGeometry& g = standard_geometry()) {
  constexpr double fold_tol = 1e-12;
  EquilibriumKind kind = EquilibriumKind::Stable;
  if (std::abs(ell - g.x_min_fold) <= fold_tol || std::abs(ell - g.x_max_fold) <= fold_tol)
    kind = EquilibriumKind::FoldDegenerate;
  else if (ell > g.x_min_fold && ell < g.x_max_fold)
    kind = EquilibriumKind::Oscillatory;
  return {kind, ell, g.phi(ell)};
}

inline nlohmann::json to_json(const EquilibriumCharacter& e) {
  return {{"kind", to_string(e.kind)}, {"x", e.x}, {"y", e.y}};
}

} // namespace clockwork::osc

#endif
