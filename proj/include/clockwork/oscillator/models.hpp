#ifndef CLOCKWORK_OSCILLATOR_MODELS_HPP
#define CLOCKWORK_OSCILLATOR_MODELS_HPP

#include <string>
#include <vector>

#include "clockwork/crn/network.hpp"
#include "clockwork/crn/polynomial.hpp"
#include "clockwork/dynamics/ode_system.hpp"
#include "clockwork/oscillator/config.hpp"

namespace clockwork::osc {

/// Species names used by every oscillator-based system.
inline const std::vector<std::string> kClockSpecies{"x", "y", "u", "v"};
inline constexpr const char* kCatalyst = "p";

/// eps1 dx/dt = eta1 (phi(x) - y) x,  dy/dt = eta1 (x - ell) y, expanded into monomials.
inline crn::PolynomialOde xy_polynomials(const OscillatorConfig& cfg) {
  const double fast = cfg.eta1 / cfg.eps1;
  using M = crn::Monomial;
  std::vector<M> dx{
      {-fast, {{"x", 4}}, "eta1/eps1"},
      {9.0 * fast, {{"x", 3}}, "9*eta1/eps1"},
      {-24.0 * fast, {{"x", 2}}, "24*eta1/eps1"},
      {21.0 * fast, {{"x", 1}}, "21*eta1/eps1"},
      {-fast, {{"x", 1}, {"y", 1}}, "eta1/eps1"},
  };
  std::vector<M> dy{
      {cfg.eta1, {{"x", 1}, {"y", 1}}, "eta1"},
      {-cfg.ell * cfg.eta1, {{"y", 1}}, "ell*eta1"},
  };
  return crn::PolynomialOde({"x", "y"}, {std::move(dx), std::move(dy)});
}

/// Fast truncated subtraction driven by x: P -> P + U, U -> 0, X -> X + V,
/// V -> 0 (all at kappa = eta1/eps2) and U + V -> 0 at kappa/eps1.
inline std::vector<crn::Reaction> clock_shaping_reactions(const OscillatorConfig& cfg) {
  const double k = cfg.kappa();
  return {
      {{{"p", 1}}, {{"p", 1}, {"u", 1}}, k, "eta1/eps2"},
      {{{"u", 1}}, {}, k, "eta1/eps2"},
      {{{"x", 1}}, {{"x", 1}, {"v", 1}}, k, "eta1/eps2"},
      {{{"v", 1}}, {}, k, "eta1/eps2"},
      {{{"u", 1}, {"v", 1}}, {}, k / cfg.eps1, "eta1/(eps1*eps2)"},
  };
}

/// Complete abstract CRN of the 4D oscillator over {x, y, u, v, p}: the
/// monomial-wise realization of the x,y pair plus the clock-shaping block.
inline crn::ReactionNetwork oscillator_network(const OscillatorConfig& cfg) {
  cfg.validate();
  auto reactions = crn::realize_network(xy_polynomials(cfg)).reactions();
  for (auto& r : clock_shaping_reactions(cfg))
    reactions.push_back(std::move(r));
  return crn::ReactionNetwork({"x", "y", "u", "v", kCatalyst}, std::move(reactions));
}

/// Mass-action ODE of a network that contains the catalyst p, with p frozen
/// at its configured value.
inline crn::PolynomialOde polynomials_with_catalyst(const crn::ReactionNetwork& net, double p) {
  return crn::substitute(crn::network_to_polynomials(net), kCatalyst, p);
}

/// 2D driving pair (x, y) with equilibrium abscissa ell.
inline dynamics::OdeSystem build_subsystem_xy(const OscillatorConfig& cfg) {
  cfg.validate();
  return dynamics::from_polynomials(xy_polynomials(cfg));
}

/// 4D clock over (x, y, u, v), integrated from its realized reaction network.
inline dynamics::OdeSystem build_oscillator(const OscillatorConfig& cfg) {
  return dynamics::from_polynomials(polynomials_with_catalyst(oscillator_network(cfg), cfg.p));
}

} // namespace clockwork::osc

#endif
