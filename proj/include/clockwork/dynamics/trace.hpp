#ifndef CLOCKWORK_DYNAMICS_TRACE_HPP
#define CLOCKWORK_DYNAMICS_TRACE_HPP

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clockwork/error.hpp"

namespace clockwork::dynamics {

struct IntegrationStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Steps retried because a component undershot below -undershoot_tolerance.
  std::size_t undershoot_retries = 0;
  /// Smallest component value of any accepted step, before clamping.
  double min_unclamped = std::numeric_limits<double>::infinity();
};

/// Time-ordered samples of one integration run.
class Trace {
public:
  Trace(std::vector<std::string> species_names, std::vector<double> times,
        std::vector<std::vector<double>> states, IntegrationStats stats = {})
      : names_(std::move(species_names)), times_(std::move(times)), states_(std::move(states)),
        stats_(stats) {
    if (times_.size() != states_.size())
      throw InputError("trace: times and states differ in length");
    for (std::size_t k = 1; k < times_.size(); ++k)
      if (!(times_[k] > times_[k - 1]))
        throw InputError("trace: times must be strictly increasing");
    for (const auto& s : states_)
      if (s.size() != names_.size())
        throw InputError("trace: state width does not match species list");
  }

  const std::vector<std::string>& species_names() const { return names_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& states() const { return states_; }
  const IntegrationStats& stats() const { return stats_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  bool has_species(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
      throw InputError("trace has no species '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t i = index_of(name);
    std::vector<double> out;
    out.reserve(states_.size());
    for (const auto& s : states_)
      out.push_back(s[i]);
    return out;
  }

  /// Same samples under different names (e.g. to feed x,y into a u,v analysis).
  Trace relabeled(std::vector<std::string> names) const {
    return Trace(std::move(names), times_, states_, stats_);
  }

private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> states_;
  IntegrationStats stats_;
};

/// Header `t,<species...>`, 12 significant digits.
inline void write_csv(const Trace& trace, std::ostream& out) {
  out << "t";
  for (const auto& n : trace.species_names())
    out << ',' << n;
  out << '\n';
  out << std::setprecision(12);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << trace.times()[k];
    for (double v : trace.states()[k])
      out << ',' << v;
    out << '\n';
  }
}

inline nlohmann::json to_json(const Trace& trace) {
  nlohmann::json j;
  j["species"] = trace.species_names();
  j["t"] = trace.times();
  for (std::size_t i = 0; i < trace.species_names().size(); ++i) {
    std::vector<double> col;
    col.reserve(trace.size());
    for (const auto& s : trace.states())
      col.push_back(s[i]);
    j["columns"][trace.species_names()[i]] = std::move(col);
  }
  return j;
}

struct SpeciesRange {
  std::string name;
  double min;
  double max;
};

inline std::vector<SpeciesRange> species_ranges(const Trace& trace) {
  std::vector<SpeciesRange> out;
  for (std::size_t i = 0; i < trace.species_names().size(); ++i) {
    SpeciesRange r{trace.species_names()[i], std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
    for (const auto& s : trace.states()) {
      r.min = std::min(r.min, s[i]);
      r.max = std::max(r.max, s[i]);
    }
    out.push_back(r);
  }
  return out;
}

} // namespace clockwork::dynamics

#endif
