#ifndef CLOCKWORK_OSCILLATOR_BASIN_HPP
#define CLOCKWORK_OSCILLATOR_BASIN_HPP

#include <cmath>
#include <optional>
#include <string>

#include <json.hpp>

#include "clockwork/dynamics/integrate.hpp"
#include "clockwork/dynamics/trace.hpp"
#include "clockwork/error.hpp"
#include "clockwork/oscillator/config.hpp"
#include "clockwork/oscillator/geometry.hpp"
#include "clockwork/oscillator/models.hpp"

namespace clockwork::osc {

/// A1 merges into the left (low-x) part of the relaxation orbit, A2 into the right part.
enum class BasinRegion { A1, A2, Equilibrium };

inline const char* to_string(BasinRegion r) {
  switch (r) {
  case BasinRegion::A1:
    return "A1";
  case BasinRegion::A2:
    return "A2";
  case BasinRegion::Equilibrium:
    return "Equilibrium";
  }
  return "?";
}

enum class Branch { Left, Right };

inline const char* to_string(Branch b) { return b == Branch::Left ? "left" : "right"; }

/// Region of the first quadrant containing (x0, y0). Points on the repelling
/// branch belong to A1 above the equilibrium and to A2 below it.
inline BasinRegion classify_initial(double x0, double y0, const CubicGeometry& g = standard_geometry(),
                                    double tol = 1e-9) {
  if (!(x0 > 0.0) || !(y0 > 0.0) || !std::isfinite(x0) || !std::isfinite(y0))
    throw InputError("classify_initial needs x0 > 0 and y0 > 0");
  const double xe = 3.0, ye = g.phi(3.0);
  if (std::hypot(x0 - xe, y0 - ye) <= tol)
    return BasinRegion::Equilibrium;
  if (y0 >= g.y_high)
    return BasinRegion::A1;
  if (y0 <= g.y_low)
    return BasinRegion::A2;
  const double xr = g.repelling_inverse(y0);
  if (std::abs(x0 - xr) <= 1e-9)
    return y0 > ye ? BasinRegion::A1 : BasinRegion::A2;
  return x0 < xr ? BasinRegion::A1 : BasinRegion::A2;
}

inline Branch expected_branch(BasinRegion r) {
  if (r == BasinRegion::Equilibrium)
    throw InputError("the equilibrium has no merge side");
  return r == BasinRegion::A1 ? Branch::Left : Branch::Right;
}

/// Attracting branch on which the (x, y) trajectory first settles: the first
/// stretch of at least `dwell` time units spent within `tol` of y = phi(x) with
/// x left of the lower fold or right of the upper fold.
inline std::optional<Branch> first_branch(const dynamics::Trace& trace, const CubicGeometry& g = standard_geometry(),
                                          double tol = 0.05, double dwell = 0.1) {
  const auto xs = trace.column("x");
  const auto ys = trace.column("y");
  const auto& ts = trace.times();
  std::optional<Branch> current;
  double since = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::optional<Branch> here;
    if (std::abs(ys[k] - g.phi(xs[k])) <= tol) {
      if (xs[k] < g.x_min_fold)
        here = Branch::Left;
      else if (xs[k] > g.x_max_fold)
        here = Branch::Right;
    }
    if (here != current) {
      current = here;
      since = ts[k];
    }
    if (current && ts[k] - since >= dwell)
      return current;
  }
  return std::nullopt;
}

/// Which clock species is first high for a sustained `dwell`: "u", "v", or empty.
inline std::string first_clock_signal(const dynamics::Trace& trace, double p, double dwell = 0.1) {
  const double threshold = 0.5 * std::min(std::abs(p - 2.0), std::abs(4.0 - p));
  const double level = threshold > 0.0 ? threshold : 0.5 * p;
  const auto us = trace.column("u");
  const auto vs = trace.column("v");
  const auto& ts = trace.times();
  double u_since = -1.0, v_since = -1.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    u_since = us[k] > level ? (u_since < 0.0 ? ts[k] : u_since) : -1.0;
    v_since = vs[k] > level ? (v_since < 0.0 ? ts[k] : v_since) : -1.0;
    const bool u_done = u_since >= 0.0 && ts[k] - u_since >= dwell;
    const bool v_done = v_since >= 0.0 && ts[k] - v_since >= dwell;
    if (u_done && (!v_done || u_since <= v_since))
      return "u";
    if (v_done)
      return "v";
  }
  return "";
}

struct BasinOutcome {
  double x0 = 0.0;
  double y0 = 0.0;
  BasinRegion predicted = BasinRegion::Equilibrium;
  std::optional<Branch> observed_branch;
  std::string first_signal;

  /// Prediction confirmed by simulation: correct merge side and clock order.
  bool consistent() const {
    if (predicted == BasinRegion::Equilibrium || !observed_branch)
      return false;
    const bool left = predicted == BasinRegion::A1;
    return *observed_branch == expected_branch(predicted) && first_signal == (left ? "u" : "v");
  }
};

/// Classifies (x0, y0), then simulates the 4D oscillator from (x0, y0, 0, 0)
/// to see which side it actually merges on and which clock signal leads.
/// Stays shorter than ten fast time constants (eps1 / eta1) do not count:
/// they are passages through a fold or the spike of the initial jump.
inline BasinOutcome check_basin(double x0, double y0, const OscillatorConfig& cfg, double t_end = 30.0,
                                const dynamics::SolverConfig& solver = {}) {
  BasinOutcome out;
  out.x0 = x0;
  out.y0 = y0;
  out.predicted = classify_initial(x0, y0);
  const auto trace = dynamics::integrate(build_oscillator(cfg), std::vector<double>{x0, y0, 0.0, 0.0}, 0.0,
                                         t_end, solver);
  const double dwell = 10.0 * cfg.eps1 / cfg.eta1;
  out.observed_branch = first_branch(trace, standard_geometry(), 0.05, dwell);
  out.first_signal = first_clock_signal(trace, cfg.p, dwell);
  return out;
}

inline nlohmann::json to_json(BasinRegion r) { return to_string(r); }

inline nlohmann::json to_json(const BasinOutcome& b) {
  nlohmann::json j{{"x0", b.x0}, {"y0", b.y0}, {"region", to_string(b.predicted)}};
  j["observed_branch"] = b.observed_branch ? nlohmann::json(to_string(*b.observed_branch)) : nlohmann::json();
  j["first_signal"] = b.first_signal;
  j["consistent"] = b.consistent();
  return j;
}

} // namespace clockwork::osc

#endif
