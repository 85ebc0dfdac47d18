#ifndef CLOCKWORK_COMPUTATION_COMPOSE_HPP
#define CLOCKWORK_COMPUTATION_COMPOSE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/computation/modules.hpp"
#include "clockwork/crn/json_io.hpp"
#include "clockwork/crn/polynomial.hpp"
#include "clockwork/dynamics/crossings.hpp"
#include "clockwork/dynamics/ode_system.hpp"
#include "clockwork/dynamics/trace.hpp"
#include "clockwork/oscillator/config.hpp"
#include "clockwork/oscillator/manifold.hpp"
#include "clockwork/oscillator/models.hpp"
#include "clockwork/period/periods.hpp"

namespace clockwork::comp {

/// Starting point of the clock part of a composed system.
struct ClockStart {
  double x = 5.0;
  double y = 5.0;
  double u = 0.0;
  double v = 0.0;
};

/// Oscillator plus computation modules as one abstract CRN. The catalyst p is
/// a species of `network` but is held at cfg.p in `polynomials` / `ode`.
struct ComposedSystem {
  crn::ReactionNetwork network;
  crn::PolynomialOde polynomials;
  dynamics::OdeSystem ode;
  osc::OscillatorConfig config;
  std::vector<double> init;
  std::optional<double> iteration_target;
  double eta3 = 0.0;
  std::vector<std::string> warnings;

  const std::vector<std::string>& names() const { return ode.names; }
};

namespace detail {

inline std::vector<std::string> regime_warnings(const osc::OscillatorConfig& cfg) {
  auto w = cfg.warnings();
  if (osc::equilibrium_character(cfg.ell).kind != osc::EquilibriumKind::Oscillatory)
    w.emplace_back("clock is not oscillatory at this ell; the modules will not alternate");
  return w;
}

inline void check_nonnegative(std::initializer_list<double> values, const char* what) {
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError(std::string(what) + " must be non-negative");
}

inline ComposedSystem finish(crn::ReactionNetwork net, const osc::OscillatorConfig& cfg, std::vector<double> init,
                             std::vector<std::string> warnings) {
  auto poly = osc::polynomials_with_catalyst(net, cfg.p);
  auto ode = dynamics::from_polynomials(poly);
  return ComposedSystem{std::move(net), std::move(poly), std::move(ode), cfg, std::move(init), std::nullopt,
                        0.0, std::move(warnings)};
}

} // namespace detail

/// Clock-driven loop s1 = s1 + s3 over (x, y, u, v, s1, s2, s3): the
/// u-gated addition and v-gated load modules run off the oscillator.
inline ComposedSystem compose_loop(const osc::OscillatorConfig& cfg, std::array<double, 3> s_init,
                                   ClockStart start = {}) {
  cfg.validate();
  detail::check_nonnegative({s_init[0], s_init[1], s_init[2]}, "s_init");
  detail::check_nonnegative({start.x, start.y, start.u, start.v}, "clock start");
  auto net = merge_networks({"x", "y", "u", "v", "s1", "s2", "s3", osc::kCatalyst},
                            {osc::oscillator_network(cfg), build_module(ModuleSpec::standard(ModuleKind::GatedAddition)),
                             build_module(ModuleSpec::standard(ModuleKind::GatedLoad))});
  return detail::finish(std::move(net), cfg, {start.x, start.y, start.u, start.v, s_init[0], s_init[1], s_init[2]},
                        detail::regime_warnings(cfg));
}

/// Loop with termination over (x, y, u, v, s1, s2, s3, w, l): the modules are
/// additionally gated by the counter W, which tracks l - s1 and vanishes once
/// the loop has run l times. A non-positive w0 selects the default (l, or 1 at l = 0).
inline ComposedSystem compose_terminating_loop(const osc::OscillatorConfig& cfg, std::array<double, 3> s_init, double l,
                                               double w0 = 0.0, double eta3 = 50.0, ClockStart start = {}) {
  cfg.validate();
  detail::check_nonnegative({s_init[0], s_init[1], s_init[2]}, "s_init");
  detail::check_nonnegative({start.x, start.y, start.u, start.v}, "clock start");
  detail::check_nonnegative({l}, "iteration target l");
  if (!std::isfinite(w0) || w0 <= 0.0)
    w0 = l > 0.0 ? l : 1.0;
  if (!(eta3 > 0.0) || !std::isfinite(eta3))
    throw InputError("eta3 must be positive");
  auto counter = ModuleSpec::standard(ModuleKind::Counter);
  counter.eta3 = eta3;
  auto net = merge_networks({"x", "y", "u", "v", "s1", "s2", "s3", "w", "l", osc::kCatalyst},
                            {osc::oscillator_network(cfg),
                             build_module(ModuleSpec::standard(ModuleKind::GatedAddition, true)),
                             build_module(ModuleSpec::standard(ModuleKind::GatedLoad, true)), build_module(counter)});
  auto sys = detail::finish(std::move(net), cfg,
                            {start.x, start.y, start.u, start.v, s_init[0], s_init[1], s_init[2], w0, l},
                            detail::regime_warnings(cfg));
  sys.iteration_target = l;
  sys.eta3 = eta3;
  return sys;
}

inline nlohmann::json to_json(const ComposedSystem& s) {
  nlohmann::json init = nlohmann::json::object();
  for (std::size_t i = 0; i < s.init.size(); ++i)
    init[s.ode.names[i]] = s.init[i];
  nlohmann::json j{{"network", crn::to_json(s.network)},
                   {"config", osc::to_json(s.config)},
                   {"initial_state", init},
                   {"warnings", s.warnings}};
  if (s.iteration_target) {
    j["iteration_target"] = *s.iteration_target;
    j["eta3"] = s.eta3;
  }
  return j;
}

/// s1 read off at successive rising edges of u, one per completed clock cycle.
struct StaircaseReport {
  std::vector<double> edge_times;
  std::vector<double> s1;
  std::vector<double> rel_error; // |s1_k - k step| / (k step)
  double step = 1.0;             // expected increment per cycle (s3)
  double max_rel_error = 0.0;
  double max_decrease = 0.0;     // largest drop of s1 between consecutive samples

  bool within(double tol, std::size_t cycles) const {
    return s1.size() >= cycles &&
           std::all_of(rel_error.begin(), rel_error.begin() + static_cast<std::ptrdiff_t>(cycles),
                       [&](double e) { return e <= tol; });
  }
};

inline StaircaseReport staircase(const dynamics::Trace& trace, double p, double step, std::size_t cycles) {
  const double thr = period::phase_threshold(p);
  const auto ups = dynamics::crossing_times(trace.times(), trace.column("u"), thr, 0.2 * thr,
                                            dynamics::Direction::Rising);
  const auto s1 = trace.column("s1");
  StaircaseReport r;
  r.step = step;
  for (std::size_t k = 1; k < ups.size() && k <= cycles; ++k) {
    const double t = ups[k];
    const auto it = std::lower_bound(trace.times().begin(), trace.times().end(), t);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - trace.times().begin()), s1.size() - 1);
    const double value = s1[j];
    const double expected = step * static_cast<double>(k);
    r.edge_times.push_back(t);
    r.s1.push_back(value);
    r.rel_error.push_back(expected != 0.0 ? std::abs(value - expected) / expected : std::abs(value));
  }
  for (double e : r.rel_error)
    r.max_rel_error = std::max(r.max_rel_error, e);
  for (std::size_t k = 1; k < s1.size(); ++k)
    r.max_decrease = std::max(r.max_decrease, s1[k - 1] - s1[k]);
  return r;
}

struct TerminationReport {
  double final_s1 = 0.0;
  double final_s2 = 0.0;
  double final_w = 0.0;
  double max_s1 = 0.0;
  double l = 0.0;
};

inline TerminationReport termination(const dynamics::Trace& trace, double l) {
  TerminationReport r;
  const auto s1 = trace.column("s1");
  r.final_s1 = s1.back();
  r.final_s2 = trace.column("s2").back();
  r.final_w = trace.column("w").back();
  r.max_s1 = *std::max_element(s1.begin(), s1.end());
  r.l = l;
  return r;
}

inline nlohmann::json to_json(const StaircaseReport& r) {
  return {{"edge_times", r.edge_times}, {"s1", r.s1},          {"rel_error", r.rel_error},
          {"step", r.step},             {"max_rel_error", r.max_rel_error}, {"max_decrease", r.max_decrease}};
}

inline nlohmann::json to_json(const TerminationReport& r) {
  return {{"final_s1", r.final_s1}, {"final_s2", r.final_s2}, {"final_w", r.final_w}, {"max_s1", r.max_s1},
          {"l", r.l}};
}

} // namespace clockwork::comp

#endif
