#ifndef CLOCKWORK_DYNAMICS_CROSSINGS_HPP
#define CLOCKWORK_DYNAMICS_CROSSINGS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/dynamics/trace.hpp"
#include "clockwork/error.hpp"

namespace clockwork::dynamics {

enum class Direction { Rising, Falling };

inline const char* to_string(Direction d) { return d == Direction::Rising ? "rising" : "falling"; }

struct CrossingEvent {
  double time = 0.0;
  std::string species;
  Direction direction = Direction::Rising;
};

/// Schmitt-trigger crossings of a sampled signal. A rising event needs the
/// signal to have been below threshold - band since the last event and to
/// exceed threshold + band; falling is symmetric. The event time is the
/// linearly interpolated crossing of the threshold itself.
inline std::vector<double> crossing_times(std::span<const double> times, std::span<const double> values,
                                          double threshold, double band, Direction which) {
  enum class Level { Unknown, Low, High };
  std::vector<double> out;
  Level level = Level::Unknown;
  std::size_t last_below = 0; // last sample <= threshold
  std::size_t last_above = 0; // last sample >= threshold
  auto interpolate = [&](std::size_t j) {
    const double v0 = values[j], v1 = values[j + 1];
    if (v1 == v0)
      return times[j];
    const double f = std::clamp((threshold - v0) / (v1 - v0), 0.0, 1.0);
    return times[j] + f * (times[j + 1] - times[j]);
  };
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = values[k];
    if (v <= threshold)
      last_below = k;
    if (v >= threshold)
      last_above = k;
    if (v > threshold + band) {
      if (level == Level::Low && which == Direction::Rising)
        out.push_back(interpolate(last_below));
      level = Level::High;
    } else if (v < threshold - band) {
      if (level == Level::High && which == Direction::Falling)
        out.push_back(interpolate(last_above));
      level = Level::Low;
    }
  }
  return out;
}

inline std::vector<CrossingEvent> detect_crossings(const Trace& trace, const std::string& species,
                                                   double threshold, double hysteresis_band) {
  if (hysteresis_band < 0.0)
    throw InputError("hysteresis band must be non-negative");
  const auto values = trace.column(species);
  std::vector<CrossingEvent> events;
  for (double t : crossing_times(trace.times(), values, threshold, hysteresis_band, Direction::Rising))
    events.push_back({t, species, Direction::Rising});
  for (double t : crossing_times(trace.times(), values, threshold, hysteresis_band, Direction::Falling))
    events.push_back({t, species, Direction::Falling});
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return events;
}

inline nlohmann::json to_json(const std::vector<CrossingEvent>& events) {
  auto j = nlohmann::json::array();
  for (const auto& e : events)
    j.push_back({{"time", e.time}, {"species", e.species}, {"direction", to_string(e.direction)}});
  return j;
}

/// Mean over the final `window` time units if every sample there lies within
/// `tol` of that mean; nullopt ("not settled") otherwise.
inline std::optional<double> settle_value(const Trace& trace, const std::string& species, double window,
                                          double tol) {
  const auto values = trace.column(species);
  if (trace.empty() || !(window > 0.0) || window >= trace.end_time() - trace.start_time())
    throw InputError("settle window must be positive and shorter than the trace");
  const double from = trace.end_time() - window;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (trace.times()[k] >= from) {
      sum += values[k];
      ++count;
    }
  const double mean = sum / static_cast<double>(count);
  for (std::size_t k = 0; k < values.size(); ++k)
    if (trace.times()[k] >= from && std::abs(values[k] - mean) > tol)
      return std::nullopt;
  return mean;
}

} // namespace clockwork::dynamics

#endif
