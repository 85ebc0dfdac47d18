#ifndef CLOCKWORK_COMPUTATION_MODULES_HPP
#define CLOCKWORK_COMPUTATION_MODULES_HPP

#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clockwork/crn/network.hpp"
#include "clockwork/error.hpp"

namespace clockwork::comp {

enum class ModuleKind { Addition, Load, GatedAddition, GatedLoad, TruncatedSubtraction, Counter };

/// Roles a global species can play inside a module.
enum class Role { S1, S2, S3, U, V, W, L, P, X };

inline const char* to_string(Role r) {
  static constexpr std::array<const char*, 9> names{"S1", "S2", "S3", "U", "V", "W", "L", "P", "X"};
  return names[static_cast<std::size_t>(r)];
}

inline const char* to_string(ModuleKind k) {
  switch (k) {
  case ModuleKind::Addition:
    return "addition";
  case ModuleKind::Load:
    return "load";
  case ModuleKind::GatedAddition:
    return "gated-addition";
  case ModuleKind::GatedLoad:
    return "gated-load";
  case ModuleKind::TruncatedSubtraction:
    return "truncated-subtraction";
  case ModuleKind::Counter:
    return "counter";
  }
  return "?";
}

struct ModuleSpec {
  ModuleKind kind = ModuleKind::Addition;
  double rate = 1.0;  // every reaction except in the counter
  double eta3 = 50.0; // counter rate
  std::map<Role, std::string> bindings;

  /// Default lower-case bindings (S1 -> "s1", U -> "u", ...). With `counter_gate`
  /// the gated modules also carry W (the W-gated variants).
  static ModuleSpec standard(ModuleKind kind, bool counter_gate = false) {
    ModuleSpec s;
    s.kind = kind;
    auto bind = [&](std::initializer_list<Role> roles) {
      for (Role r : roles) {
        std::string name = to_string(r);
        for (auto& c : name)
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        s.bindings[r] = name;
      }
    };
    switch (kind) {
    case ModuleKind::Addition:
      bind({Role::S1, Role::S2, Role::S3});
      break;
    case ModuleKind::Load:
      bind({Role::S1, Role::S2});
      break;
    case ModuleKind::GatedAddition:
      bind({Role::S1, Role::S2, Role::S3, Role::U});
      break;
    case ModuleKind::GatedLoad:
      bind({Role::S1, Role::S2, Role::V});
      break;
    case ModuleKind::TruncatedSubtraction:
      bind({Role::P, Role::X, Role::U, Role::V});
      break;
    case ModuleKind::Counter:
      bind({Role::L, Role::W, Role::S1});
      break;
    }
    if (counter_gate && (kind == ModuleKind::GatedAddition || kind == ModuleKind::GatedLoad))
      bind({Role::W});
    return s;
  }

  std::vector<Role> required_roles() const {
    switch (kind) {
    case ModuleKind::Addition:
      return {Role::S1, Role::S2, Role::S3};
    case ModuleKind::Load:
      return {Role::S1, Role::S2};
    case ModuleKind::GatedAddition:
      return {Role::S1, Role::S2, Role::S3, Role::U};
    case ModuleKind::GatedLoad:
      return {Role::S1, Role::S2, Role::V};
    case ModuleKind::TruncatedSubtraction:
      return {Role::P, Role::X, Role::U, Role::V};
    case ModuleKind::Counter:
      return {Role::L, Role::W, Role::S1};
    }
    return {};
  }

  void validate() const {
    for (Role r : required_roles())
      if (!bindings.count(r) || bindings.at(r).empty())
        throw InputError(std::string(to_string(kind)) + " module is missing a binding for " + to_string(r));
    std::set<std::string> seen;
    for (const auto& [role, name] : bindings)
      if (!seen.insert(name).second)
        throw InputError("species '" + name + "' is bound to more than one role");
    if (!(rate > 0.0) || !std::isfinite(rate))
      throw InputError("module rate must be positive");
    if (kind == ModuleKind::Counter && (!(eta3 > 0.0) || !std::isfinite(eta3)))
      throw InputError("counter rate eta3 must be positive");
  }

  const std::string& name(Role r) const { return bindings.at(r); }
};

/// Reaction list of one module over its bound species (rate constants 1
/// unless parameterized; the counter runs at eta3).
inline crn::ReactionNetwork build_module(const ModuleSpec& spec) {
  spec.validate();
  const double k = spec.rate;
  auto n = [&](Role r) { return spec.name(r); };
  std::vector<crn::Reaction> rs;
  std::vector<std::string> species;
  auto uses = [&](std::initializer_list<Role> roles) {
    for (Role r : roles)
      species.push_back(n(r));
  };
  // Catalysts (clock and, if bound, the counter) added to both sides of every reaction.
  auto gate = [&](crn::Complex c, std::initializer_list<Role> catalysts) {
    for (Role r : catalysts)
      if (spec.bindings.count(r))
        c[n(r)] += 1;
    return c;
  };

  switch (spec.kind) {
  case ModuleKind::Addition:
    uses({Role::S1, Role::S2, Role::S3});
    rs = {{{{n(Role::S1), 1}}, {{n(Role::S1), 1}, {n(Role::S2), 1}}, k, ""},
          {{{n(Role::S3), 1}}, {{n(Role::S3), 1}, {n(Role::S2), 1}}, k, ""},
          {{{n(Role::S2), 1}}, {}, k, ""}};
    break;
  case ModuleKind::Load:
    uses({Role::S1, Role::S2});
    rs = {{{{n(Role::S2), 1}}, {{n(Role::S1), 1}, {n(Role::S2), 1}}, k, ""}, {{{n(Role::S1), 1}}, {}, k, ""}};
    break;
  case ModuleKind::GatedAddition: {
    uses({Role::S1, Role::S2, Role::S3, Role::U});
    if (spec.bindings.count(Role::W))
      uses({Role::W});
    const auto g = {Role::U, Role::W};
    rs = {{gate({{n(Role::S1), 1}}, g), gate({{n(Role::S1), 1}, {n(Role::S2), 1}}, g), k, ""},
          {gate({{n(Role::S3), 1}}, g), gate({{n(Role::S3), 1}, {n(Role::S2), 1}}, g), k, ""},
          {gate({{n(Role::S2), 1}}, g), gate({}, g), k, ""}};
    break;
  }
  case ModuleKind::GatedLoad: {
    uses({Role::S1, Role::S2, Role::V});
    if (spec.bindings.count(Role::W))
      uses({Role::W});
    const auto g = {Role::V, Role::W};
    rs = {{gate({{n(Role::S2), 1}}, g), gate({{n(Role::S1), 1}, {n(Role::S2), 1}}, g), k, ""},
          {gate({{n(Role::S1), 1}}, g), gate({}, g), k, ""}};
    break;
  }
  case ModuleKind::TruncatedSubtraction:
    uses({Role::P, Role::X, Role::U, Role::V});
    rs = {{{{n(Role::P), 1}}, {{n(Role::P), 1}, {n(Role::U), 1}}, k, ""},
          {{{n(Role::U), 1}}, {}, k, ""},
          {{{n(Role::X), 1}}, {{n(Role::X), 1}, {n(Role::V), 1}}, k, ""},
          {{{n(Role::U), 1}, {n(Role::V), 1}}, {}, k, ""}};
    break;
  case ModuleKind::Counter: {
    uses({Role::L, Role::W, Role::S1});
    const double e = spec.eta3;
    rs = {{{{n(Role::L), 1}, {n(Role::W), 1}}, {{n(Role::L), 1}, {n(Role::W), 2}}, e, "eta3"},
          {{{n(Role::S1), 1}, {n(Role::W), 1}}, {{n(Role::S1), 1}}, e, "eta3"},
          {{{n(Role::W), 2}}, {{n(Role::W), 1}}, e, "eta3"}};
    break;
  }
  }
  return crn::ReactionNetwork(std::move(species), std::move(rs));
}

/// w(t) for dw/dt = eta3 (l - s1 - w) w with s1 and l held fixed.
inline double counter_closed_form(double l, double s1, double w0, double eta3, double t) {
  if (w0 < 0.0 || t < 0.0)
    throw InputError("counter_closed_form needs w0 >= 0 and t >= 0");
  const double d = l - s1;
  if (d == 0.0)
    return w0 / (1.0 + eta3 * w0 * t);
  if (d > 0.0)
    return d * w0 / (w0 + (d - w0) * std::exp(-eta3 * d * t));
  // d < 0: the same formula multiplied through by exp(eta3 d t), which stays bounded.
  const double f = std::exp(eta3 * d * t);
  return d * w0 * f / (w0 * f + d - w0);
}

/// One network over an explicit species order from several reaction lists.
inline crn::ReactionNetwork merge_networks(std::vector<std::string> species,
                                           const std::vector<crn::ReactionNetwork>& parts) {
  std::vector<crn::Reaction> all;
  for (const auto& part : parts)
    all.insert(all.end(), part.reactions().begin(), part.reactions().end());
  return crn::ReactionNetwork(std::move(species), std::move(all));
}

} // namespace clockwork::comp

#endif
