#ifndef CLOCKWORK_OSCILLATOR_CLOCK_HPP
#define CLOCKWORK_OSCILLATOR_CLOCK_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/dynamics/crossings.hpp"
#include "clockwork/dynamics/trace.hpp"
#include "clockwork/oscillator/config.hpp"

namespace clockwork::osc {

/// Tunable constants of the clock-signal test.
struct ClockThresholds {
  double abrupt_fraction = 0.02; // max transition width / period
  double low_factor = 10.0;      // low level <= max(low_factor * eps1, low_floor) * amplitude
  double low_floor = 1e-3;
  double high_fraction = 0.5;    // high-phase minimum >= high_fraction * median high amplitude
  std::size_t min_periods = 2;

  double low_bound(double eps1) const { return std::max(low_factor * eps1, low_floor); }
};

struct SignalStats {
  double high_amplitude = 0.0; // median of per-phase maxima
  double high_min = 0.0;       // lowest high-phase sample away from transitions
  double low_max = 0.0;        // highest low-phase sample away from transitions
  double max_transition = 0.0; // widest 10%-90% transition, in time units
  std::size_t transitions = 0;
};

struct ClockReport {
  bool passes = false;
  bool abrupt = false;
  bool levels = false;
  bool complementary = false;
  std::string reason;
  double period = 0.0;
  std::size_t periods = 0;
  double transient_end = 0.0;
  SignalStats u, v;
  double low_bound = 0.0;              // the factor max(10 eps1, 1e-3)
  double max_low_residual = 0.0;       // max low-phase level / amplitude over u and v
  double max_transition_fraction = 0.0; // widest transition / period
  double max_overlap = 0.0;            // max of min(u, v) away from transitions
};

namespace detail {

/// Schmitt state per sample: -1 before the first decision, 0 low, 1 high.
inline std::vector<int> schmitt_states(const std::vector<double>& values, double threshold, double band) {
  std::vector<int> out(values.size(), -1);
  int level = -1;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > threshold + band)
      level = 1;
    else if (values[k] < threshold - band)
      level = 0;
    out[k] = level;
  }
  return out;
}

inline double sample_at(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  if (t <= ts.front())
    return vs.front();
  if (t >= ts.back())
    return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - ts.begin());
  const double f = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  return vs[j - 1] + f * (vs[j] - vs[j - 1]);
}

/// First time in [from, to] at which the signal passes `level` in the given direction.
inline double passage(const std::vector<double>& ts, const std::vector<double>& vs, double level, double from,
                      double to, bool rising) {
  double prev_t = from, prev_v = sample_at(ts, vs, from);
  auto k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), from) - ts.begin());
  // Samples strictly inside the window, then the interpolated value at its end.
  for (bool last = false; !last; ++k) {
    last = k >= ts.size() || ts[k] >= to;
    const double t = last ? to : ts[k];
    const double v = last ? sample_at(ts, vs, to) : vs[k];
    if (rising ? v >= level : v <= level) {
      if (v == prev_v)
        return t;
      return prev_t + (level - prev_v) / (v - prev_v) * (t - prev_t);
    }
    prev_t = t;
    prev_v = v;
  }
  return to;
}

/// Width of the 10%-90% passage between the levels held `w` before and after the edge.
inline double transition_width(const std::vector<double>& ts, const std::vector<double>& vs, double edge, double w,
                               bool rising) {
  const double before = sample_at(ts, vs, edge - w);
  const double after = sample_at(ts, vs, edge + w);
  const double step = after - before;
  if (rising ? step <= 0.0 : step >= 0.0)
    return 2.0 * w;
  const double t10 = passage(ts, vs, before + 0.1 * step, edge - w, edge + w, rising);
  const double t90 = passage(ts, vs, before + 0.9 * step, edge - w, edge + w, rising);
  return std::max(0.0, t90 - t10);
}

inline double median(std::vector<double> xs) {
  if (xs.empty())
    return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

} // namespace detail

/// Checks that u and v form a pair of symmetrical clock signals: abrupt
/// transitions, near-zero low phases with a stable high level, and no overlap.
/// Everything before the second rising edge of u is treated as transient.
inline ClockReport validate_clock(const dynamics::Trace& trace, const OscillatorConfig& cfg,
                                  const ClockThresholds& th = {}) {
  ClockReport rep;
  rep.low_bound = th.low_bound(cfg.eps1);
  const auto& ts = trace.times();
  const auto us = trace.column("u");
  const auto vs = trace.column("v");
  if (ts.size() < 3) {
    rep.reason = "no oscillation detected";
    return rep;
  }

  // Thresholds adapt to each signal's own range so non-clock signals are judged on their levels.
  struct Edges {
    double threshold = 0.0, band = 0.0;
    std::vector<double> rising, falling;
  };
  auto edges_of = [&](const std::vector<double>& xs) {
    Edges e;
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const double range = *hi - *lo;
    if (!(range > 1e-9 * std::max(1.0, std::abs(*hi))))
      return e;
    e.threshold = *lo + 0.25 * range;
    e.band = 0.05 * range;
    e.rising = dynamics::crossing_times(ts, xs, e.threshold, e.band, dynamics::Direction::Rising);
    e.falling = dynamics::crossing_times(ts, xs, e.threshold, e.band, dynamics::Direction::Falling);
    return e;
  };
  const Edges eu = edges_of(us), ev = edges_of(vs);
  if (eu.rising.size() < th.min_periods + 2 || ev.rising.empty()) {
    rep.reason = "no oscillation detected";
    return rep;
  }

  rep.transient_end = eu.rising[1];
  const std::vector<double> marks(eu.rising.begin() + 1, eu.rising.end());
  rep.periods = marks.size() - 1;
  rep.period = (marks.back() - marks.front()) / static_cast<double>(rep.periods);
  const double w = th.abrupt_fraction * rep.period;

  // Samples within w of any u or v edge belong to a transition.
  std::vector<double> all_edges;
  for (const auto* list : {&eu.rising, &eu.falling, &ev.rising, &ev.falling})
    all_edges.insert(all_edges.end(), list->begin(), list->end());
  std::sort(all_edges.begin(), all_edges.end());
  auto near_edge = [&](double t) {
    auto it = std::lower_bound(all_edges.begin(), all_edges.end(), t - w);
    return it != all_edges.end() && *it <= t + w;
  };

  auto analyse = [&](const std::vector<double>& xs, const Edges& e) {
    SignalStats s;
    for (bool rising : {true, false})
      for (double edge : rising ? e.rising : e.falling) {
        if (edge < rep.transient_end || edge + w > ts.back())
          continue;
        s.max_transition = std::max(s.max_transition, detail::transition_width(ts, xs, edge, w, rising));
        ++s.transitions;
      }
    const auto state = detail::schmitt_states(xs, e.threshold, e.band);
    std::vector<double> phase_max;
    double current = -1.0;
    s.high_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (ts[k] < rep.transient_end)
        continue;
      if (state[k] == 1) {
        current = std::max(current, xs[k]);
      } else if (current >= 0.0) {
        phase_max.push_back(current);
        current = -1.0;
      }
      if (near_edge(ts[k]))
        continue;
      if (state[k] == 1)
        s.high_min = std::min(s.high_min, xs[k]);
      else if (state[k] == 0)
        s.low_max = std::max(s.low_max, xs[k]);
    }
    if (current >= 0.0)
      phase_max.push_back(current);
    s.high_amplitude = detail::median(phase_max);
    if (!std::isfinite(s.high_min))
      s.high_min = 0.0;
    return s;
  };
  rep.u = analyse(us, eu);
  rep.v = analyse(vs, ev);

  rep.max_transition_fraction = std::max(rep.u.max_transition, rep.v.max_transition) / rep.period;
  rep.abrupt = rep.u.transitions > 0 && rep.v.transitions > 0 &&
               rep.max_transition_fraction <= th.abrupt_fraction;

  auto residual = [](const SignalStats& s) { return s.high_amplitude > 0.0 ? s.low_max / s.high_amplitude : 1.0; };
  rep.max_low_residual = std::max(residual(rep.u), residual(rep.v));
  auto high_ok = [&](const SignalStats& s) {
    return s.high_amplitude > 0.0 && s.high_min >= th.high_fraction * s.high_amplitude;
  };
  rep.levels = rep.max_low_residual <= rep.low_bound && high_ok(rep.u) && high_ok(rep.v);

  for (std::size_t k = 0; k < ts.size(); ++k)
    if (ts[k] >= rep.transient_end && !near_edge(ts[k]))
      rep.max_overlap = std::max(rep.max_overlap, std::min(us[k], vs[k]));
  const double amplitude = std::max(rep.u.high_amplitude, rep.v.high_amplitude);
  rep.complementary = rep.max_overlap <= rep.low_bound * amplitude;

  rep.passes = rep.abrupt && rep.levels && rep.complementary;
  if (!rep.passes) {
    std::string why;
    if (!rep.abrupt)
      why += "transitions not abrupt; ";
    if (!rep.levels)
      why += "low/high levels out of bounds; ";
    if (!rep.complementary)
      why += "u and v overlap; ";
    rep.reason = why.substr(0, why.size() - 2);
  }
  return rep;
}

inline nlohmann::json to_json(const SignalStats& s) {
  return {{"high_amplitude", s.high_amplitude},
          {"high_min", s.high_min},
          {"low_max", s.low_max},
          {"max_transition", s.max_transition},
          {"transitions", s.transitions}};
}

inline nlohmann::json to_json(const ClockReport& r) {
  return {{"passes", r.passes},
          {"criteria", {{"abrupt", r.abrupt}, {"levels", r.levels}, {"complementary", r.complementary}}},
          {"reason", r.reason},
          {"period", r.period},
          {"periods", r.periods},
          {"transient_end", r.transient_end},
          {"u", to_json(r.u)},
          {"v", to_json(r.v)},
          {"low_bound_factor", r.low_bound},
          {"max_low_residual", r.max_low_residual},
          {"max_transition_fraction", r.max_transition_fraction},
          {"max_overlap", r.max_overlap}};
}

} // namespace clockwork::osc

#endif
