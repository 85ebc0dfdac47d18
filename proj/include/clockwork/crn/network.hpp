#ifndef CLOCKWORK_CRN_NETWORK_HPP
#define CLOCKWORK_CRN_NETWORK_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clockwork/error.hpp"

namespace clockwork::crn {

/// Species name -> stoichiometric coefficient. Zero entries are never stored.
using Complex = std::map<std::string, int>;

struct Species {
  std::string id;
  std::size_t index = 0;
};

struct Reaction {
  Complex reactants;
  Complex products;
  double rate = 1.0;
  /// Symbolic form of the rate ("eta1/eps1"), display only.
  std::string rate_label;
};

/// Integer stoichiometric matrix, n species x m reactions, row-major.
struct StoichiometricMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> data;

  int operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::vector<int> row(std::size_t i) const {
    return {data.begin() + static_cast<std::ptrdiff_t>(i * cols),
            data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)};
  }
};

/// A validated mass-action reaction network. Immutable after construction.
class ReactionNetwork {
public:
  ReactionNetwork(std::vector<std::string> names, std::vector<Reaction> reactions)
      : reactions_(std::move(reactions)) {
    if (names.empty())
      throw InputError("network needs at least one species");
    if (reactions_.empty())
      throw InputError("network needs at least one reaction");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty())
        throw InputError("empty species name");
      if (!index_.emplace(names[i], i).second)
        throw InputError("duplicate species '" + names[i] + "'");
      species_.push_back({std::move(names[i]), i});
    }
    for (std::size_t j = 0; j < reactions_.size(); ++j) {
      auto& r = reactions_[j];
      if (!(r.rate > 0.0) || !std::isfinite(r.rate))
        throw InputError("reaction " + std::to_string(j) + ": rate must be positive and finite");
      std::erase_if(r.reactants, [](const auto& kv) { return kv.second == 0; });
      std::erase_if(r.products, [](const auto& kv) { return kv.second == 0; });
      if (r.reactants.empty() && r.products.empty())
        throw InputError("reaction " + std::to_string(j) + ": empty -> empty is not a reaction");
      for (const Complex* c : {&r.reactants, &r.products}) {
        for (const auto& [name, coeff] : *c) {
          if (coeff < 0)
            throw InputError("reaction " + std::to_string(j) + ": negative coefficient on '" +
                             name + "'");
          if (!index_.contains(name))
            throw InputError("reaction " + std::to_string(j) + ": unknown species '" + name + "'");
        }
      }
    }
  }

  std::size_t num_species() const { return species_.size(); }
  std::size_t num_reactions() const { return reactions_.size(); }
  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  std::vector<std::string> species_names() const {
    std::vector<std::string> out;
    out.reserve(species_.size());
    for (const auto& s : species_)
      out.push_back(s.id);
    return out;
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }

private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline ReactionNetwork build_network(std::vector<std::string> species, std::vector<Reaction> reactions) {
  return ReactionNetwork(std::move(species), std::move(reactions));
}

/// Entry (i, j) is product minus reactant coefficient of species i in reaction j.
inline StoichiometricMatrix stoichiometric_matrix(const ReactionNetwork& net) {
  StoichiometricMatrix m{net.num_species(), net.num_reactions(), {}};
  m.data.assign(m.rows * m.cols, 0);
  for (std::size_t j = 0; j < m.cols; ++j) {
    const auto& r = net.reactions()[j];
    for (const auto& [name, c] : r.products)
      m.data[*net.index_of(name) * m.cols + j] += c;
    for (const auto& [name, c] : r.reactants)
      m.data[*net.index_of(name) * m.cols + j] -= c;
  }
  return m;
}

namespace detail {

inline double ipow(double base, int exp) {
  double out = 1.0; // 0^0 = 1
  for (int k = 0; k < exp; ++k)
    out *= base;
  return out;
}

inline void check_state(const ReactionNetwork& net, std::span<const double> s) {
  if (s.size() != net.num_species())
    throw InputError("state has " + std::to_string(s.size()) + " entries, network has " +
                     std::to_string(net.num_species()) + " species");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 0.0)
      throw InputError("negative concentration for '" + net.species()[i].id + "'");
}

} // namespace detail

/// Mass-action rate of every reaction, k_j * prod s_i^{a_ji}.
inline std::vector<double> mass_action_rates(const ReactionNetwork& net, std::span<const double> s) {
  detail::check_state(net, s);
  std::vector<double> rates;
  rates.reserve(net.num_reactions());
  for (const auto& r : net.reactions()) {
    double rate = r.rate;
    for (const auto& [name, a] : r.reactants)
      rate *= detail::ipow(s[*net.index_of(name)], a);
    rates.push_back(rate);
  }
  return rates;
}

inline std::vector<double> ode_rhs(const ReactionNetwork& net, std::span<const double> s) {
  const auto rates = mass_action_rates(net, s);
  const auto xi = stoichiometric_matrix(net);
  std::vector<double> ds(net.num_species(), 0.0);
  for (std::size_t i = 0; i < xi.rows; ++i)
    for (std::size_t j = 0; j < xi.cols; ++j)
      ds[i] += xi(i, j) * rates[j];
  return ds;
}

inline std::string format_complex(const Complex& c) {
  if (c.empty())
    return "0";
  std::string out;
  for (const auto& [name, k] : c) {
    if (!out.empty())
      out += " + ";
    if (k != 1)
      out += std::to_string(k);
    out += name;
  }
  return out;
}

/// "2s1 -> s2 + s3  (k = 1)"
inline std::string format_reaction(const Reaction& r) {
  std::string out = format_complex(r.reactants) + " -> " + format_complex(r.products) + "  (k = ";
  out += r.rate_label.empty() ? std::to_string(r.rate) : r.rate_label + " = " + std::to_string(r.rate);
  return out + ")";
}

} // namespace clockwork::crn

#endif
