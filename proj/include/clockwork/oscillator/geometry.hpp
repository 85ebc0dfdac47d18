#ifndef CLOCKWORK_OSCILLATOR_GEOMETRY_HPP
#define CLOCKWORK_OSCILLATOR_GEOMETRY_HPP

#include <array>
#include <cmath>

#include "clockwork/error.hpp"

namespace clockwork::osc {

/// The S-shaped critical manifold y = phi(x) = -x^3 + 9x^2 - 24x + 21 of the
/// driving oscillator, with its folds and jump targets.
struct CubicGeometry {
  /// Coefficients of x^3, x^2, x, 1.
  std::array<double, 4> phi_coeffs{-1.0, 9.0, -24.0, 21.0};
  double x_min_fold = 2.0; // local minimum of phi
  double x_max_fold = 4.0; // local maximum of phi
  double x_left = 1.0;     // phi(x_left) == y at the upper fold
  double x_right = 5.0;    // phi(x_right) == y at the lower fold
  double y_low = 1.0;      // phi(x_min_fold)
  double y_high = 5.0;     // phi(x_max_fold)

  double phi(double x) const {
    return ((phi_coeffs[0] * x + phi_coeffs[1]) * x + phi_coeffs[2]) * x + phi_coeffs[3];
  }

  double dphi(double x) const { return (3.0 * phi_coeffs[0] * x + 2.0 * phi_coeffs[1]) * x + phi_coeffs[2]; }

  /// Inverse of phi on its repelling middle branch (x_min_fold, x_max_fold),
  /// where phi is increasing. Requires y_low < y < y_high.
  double repelling_inverse(double y, double tol = 1e-10) const {
    if (!(y > y_low && y < y_high))
      throw InputError("repelling branch is only defined for y_low < y < y_high");
    double lo = x_min_fold, hi = x_max_fold;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// True when the fold/jump identities hold to `tol`.
  bool consistent(double tol = 1e-12) const {
    return std::abs(dphi(x_min_fold)) <= tol && std::abs(dphi(x_max_fold)) <= tol &&
           std::abs(phi(x_left) - y_high) <= tol && std::abs(phi(x_right) - y_low) <= tol &&
           std::abs(phi(x_min_fold) - y_low) <= tol && std::abs(phi(x_max_fold) - y_high) <= tol;
  }
};

inline const CubicGeometry& standard_geometry() {
  static const CubicGeometry g{};
  return g;
}

} // namespace clockwork::osc

#endif
