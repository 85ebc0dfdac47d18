#ifndef CLOCKWORK_DYNAMICS_ODE_SYSTEM_HPP
#define CLOCKWORK_DYNAMICS_ODE_SYSTEM_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clockwork/crn/polynomial.hpp"

namespace clockwork::dynamics {

using RhsFn = std::function<void(double t, std::span<const double> s, std::span<double> ds)>;
/// Writes the row-major n x n matrix d(rhs)/ds.
using JacobianFn = std::function<void(double t, std::span<const double> s, std::span<double> jac)>;

/// ds/dt = rhs(t, s) over named state components. An empty jacobian means
/// the solver falls back to finite differences.
struct OdeSystem {
  std::vector<std::string> names;
  RhsFn rhs;
  JacobianFn jacobian;

  std::size_t dimension() const { return names.size(); }

  std::vector<double> eval(double t, std::span<const double> s) const {
    std::vector<double> ds(dimension());
    rhs(t, s, ds);
    return ds;
  }
};

/// Autonomous system with the analytic Jacobian of the polynomial right-hand side.
inline OdeSystem from_polynomials(const crn::PolynomialOde& ode) {
  auto compiled = std::make_shared<const crn::CompiledPolynomial>(ode);
  OdeSystem sys;
  sys.names = ode.species();
  sys.rhs = [compiled](double, std::span<const double> s, std::span<double> ds) { compiled->rhs(s, ds); };
  sys.jacobian = [compiled](double, std::span<const double> s, std::span<double> jac) {
    compiled->jacobian(s, jac);
  };
  return sys;
}

} // namespace clockwork::dynamics

#endif
