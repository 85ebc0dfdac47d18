#ifndef CLOCKWORK_OSCILLATOR_CONFIG_HPP
#define CLOCKWORK_OSCILLATOR_CONFIG_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/error.hpp"

namespace clockwork::osc {

/// Parameters of the 4D relaxation oscillator. Defaults are the canonical
/// clock: eps1 = eps2 = 1e-3, eta1 = 0.1, p = 3, ell = 3.
struct OscillatorConfig {
  double eps1 = 1e-3; // time scale of x
  double eps2 = 1e-3; // time scale of u, v relative to x (eta1 / kappa)
  double eta1 = 0.1;  // overall rate of the driving pair
  double p = 3.0;     // catalyst P concentration
  double ell = 3.0;   // x-coordinate of the equilibrium

  double kappa() const { return eta1 / eps2; }

  void validate() const {
    auto in_unit = [](double e) { return e > 0.0 && e < 1.0; };
    if (!in_unit(eps1) || !in_unit(eps2))
      throw InputError("eps1 and eps2 must lie in (0, 1)");
    if (!(eta1 > 0.0) || !std::isfinite(eta1))
      throw InputError("eta1 must be positive");
    if (!(p > 0.0) || !std::isfinite(p))
      throw InputError("p must be positive");
    if (!std::isfinite(ell))
      throw InputError("ell must be finite");
  }

  /// Non-fatal advisories about the operating regime.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (eps1 > 0.05 || eps2 > 0.05)
      out.emplace_back("eps1/eps2 above 0.05: time-scale separation is weak");
    if (!(ell > 2.0 && ell < 4.0))
      out.emplace_back("ell outside (2, 4): the equilibrium is not on the repelling branch, no oscillation");
    if (!(p > 2.0 && p < 4.0))
      out.emplace_back("p outside (2, 4): u/v lose their near-zero low phase");
    return out;
  }
};

inline nlohmann::json to_json(const OscillatorConfig& c) {
  return {{"eps1", c.eps1}, {"eps2", c.eps2}, {"eta1", c.eta1}, {"p", c.p}, {"ell", c.ell}};
}

} // namespace clockwork::osc

#endif
