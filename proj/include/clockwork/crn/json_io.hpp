#ifndef CLOCKWORK_CRN_JSON_IO_HPP
#define CLOCKWORK_CRN_JSON_IO_HPP

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/crn/network.hpp"
#include "clockwork/crn/polynomial.hpp"
#include "clockwork/error.hpp"

// Interchange formats:
//   network:    {"species": [..], "reactions": [{"reactants": {name: int}, "products": {..},
//                "rate": float, "label": "eta1/eps1"?}]}
//   polynomial: {"species": [..], "equations": {name: [{"coeff": float, "exps": {name: int},
//                "label": str?}]}}
// "label" is optional in both and only carries the symbolic rate for display.

namespace clockwork::crn {

namespace detail {

inline Complex complex_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_object())
    throw InputError(std::string(what) + " must be an object of name -> integer");
  Complex c;
  for (const auto& [name, v] : j.items()) {
    if (!v.is_number_integer())
      throw InputError(std::string(what) + " coefficient for '" + name + "' must be an integer");
    c[name] = v.get<int>();
  }
  return c;
}

inline nlohmann::json complex_to_json(const Complex& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, k] : c)
    j[name] = k;
  return j;
}

} // namespace detail

inline nlohmann::json to_json(const ReactionNetwork& net) {
  nlohmann::json j;
  j["species"] = net.species_names();
  j["reactions"] = nlohmann::json::array();
  for (const auto& r : net.reactions()) {
    nlohmann::json jr;
    jr["reactants"] = detail::complex_to_json(r.reactants);
    jr["products"] = detail::complex_to_json(r.products);
    jr["rate"] = r.rate;
    if (!r.rate_label.empty())
      jr["label"] = r.rate_label;
    j["reactions"].push_back(std::move(jr));
  }
  return j;
}

inline ReactionNetwork network_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("species") || !j.contains("reactions"))
      throw InputError("network JSON needs 'species' and 'reactions'");
    auto names = j.at("species").get<std::vector<std::string>>();
    std::vector<Reaction> reactions;
    for (const auto& jr : j.at("reactions")) {
      Reaction r;
      r.reactants = detail::complex_from_json(jr.value("reactants", nlohmann::json::object()), "reactants");
      r.products = detail::complex_from_json(jr.value("products", nlohmann::json::object()), "products");
      if (!jr.contains("rate") || !jr.at("rate").is_number())
        throw InputError("reaction needs a numeric 'rate'");
      r.rate = jr.at("rate").get<double>();
      r.rate_label = jr.value("label", std::string{});
      reactions.push_back(std::move(r));
    }
    return ReactionNetwork(std::move(names), std::move(reactions));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed network JSON: ") + e.what());
  }
}

inline nlohmann::json to_json(const PolynomialOde& ode) {
  nlohmann::json j;
  j["species"] = ode.species();
  j["equations"] = nlohmann::json::object();
  for (std::size_t i = 0; i < ode.dimension(); ++i) {
    auto terms = nlohmann::json::array();
    for (const auto& m : ode.equations()[i]) {
      nlohmann::json jm;
      jm["coeff"] = m.coeff;
      jm["exps"] = detail::complex_to_json(m.exps);
      if (!m.label.empty())
        jm["label"] = m.label;
      terms.push_back(std::move(jm));
    }
    j["equations"][ode.species()[i]] = std::move(terms);
  }
  return j;
}

inline PolynomialOde polynomials_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("species") || !j.contains("equations"))
      throw InputError("polynomial JSON needs 'species' and 'equations'");
    auto names = j.at("species").get<std::vector<std::string>>();
    const auto& eqs = j.at("equations");
    for (const auto& [name, _] : eqs.items())
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw InputError("equation for unknown species '" + name + "'");
    std::vector<std::vector<Monomial>> equations(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!eqs.contains(names[i]))
        continue;
      for (const auto& jm : eqs.at(names[i])) {
        if (!jm.contains("coeff") || !jm.at("coeff").is_number())
          throw InputError("monomial needs a numeric 'coeff'");
        Monomial m;
        m.coeff = jm.at("coeff").get<double>();
        m.exps = detail::complex_from_json(jm.value("exps", nlohmann::json::object()), "exps");
        m.label = jm.value("label", std::string{});
        equations[i].push_back(std::move(m));
      }
    }
    return PolynomialOde(std::move(names), std::move(equations));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

} // namespace clockwork::crn

#endif
