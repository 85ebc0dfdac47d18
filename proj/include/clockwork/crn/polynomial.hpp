#ifndef CLOCKWORK_CRN_POLYNOMIAL_HPP
#define CLOCKWORK_CRN_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clockwork/crn/network.hpp"
#include "clockwork/error.hpp"

namespace clockwork::crn {

/// Coefficients with magnitude below this are dropped during canonicalization.
inline constexpr double kCoefficientFloor = 1e-15;

struct Monomial {
  double coeff = 0.0;
  /// Species name -> exponent; zero exponents are never stored.
  Complex exps;
  /// Symbolic magnitude of the coefficient, display only.
  std::string label;
};

/// Per-species polynomial right-hand sides in canonical collected form:
/// no two monomials of one equation share an exponent map, no zero coefficients,
/// monomials ordered by total degree (descending) then exponents in species order.
class PolynomialOde {
public:
  PolynomialOde(std::vector<std::string> species, std::vector<std::vector<Monomial>> equations)
      : species_(std::move(species)), equations_(std::move(equations)) {
    if (species_.empty())
      throw InputError("polynomial system needs at least one species");
    if (equations_.size() != species_.size())
      throw InputError("one equation per species required");
    for (std::size_t i = 0; i < species_.size(); ++i) {
      if (std::find(species_.begin(), species_.begin() + static_cast<std::ptrdiff_t>(i),
                    species_[i]) != species_.begin() + static_cast<std::ptrdiff_t>(i))
        throw InputError("duplicate species '" + species_[i] + "'");
    }
    for (auto& eq : equations_)
      eq = collect(std::move(eq));
  }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<std::vector<Monomial>>& equations() const { return equations_; }
  std::size_t dimension() const { return species_.size(); }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end())
      throw InputError("unknown species '" + name + "'");
    return static_cast<std::size_t>(it - species_.begin());
  }

  const std::vector<Monomial>& equation(const std::string& name) const {
    return equations_[index_of(name)];
  }

  /// Coefficient-exact comparison; labels are ignored.
  friend bool operator==(const PolynomialOde& a, const PolynomialOde& b) {
    if (a.species_ != b.species_)
      return false;
    for (std::size_t i = 0; i < a.equations_.size(); ++i) {
      const auto& ea = a.equations_[i];
      const auto& eb = b.equations_[i];
      if (ea.size() != eb.size())
        return false;
      for (std::size_t k = 0; k < ea.size(); ++k)
        if (ea[k].coeff != eb[k].coeff || ea[k].exps != eb[k].exps)
          return false;
    }
    return true;
  }

private:
  std::vector<double> exponent_vector(const Complex& exps) const {
    std::vector<double> v(species_.size(), 0.0);
    for (const auto& [name, e] : exps)
      v[index_of(name)] = e;
    return v;
  }

  std::vector<Monomial> collect(std::vector<Monomial> terms) const {
    for (auto& t : terms) {
      std::erase_if(t.exps, [](const auto& kv) { return kv.second == 0; });
      for (const auto& [name, e] : t.exps) {
        index_of(name);
        if (e < 0)
          throw InputError("negative exponent on '" + name + "'");
      }
      if (!std::isfinite(t.coeff))
        throw InputError("non-finite coefficient");
    }
    std::vector<Monomial> out;
    for (auto& t : terms) {
      auto it = std::find_if(out.begin(), out.end(), [&](const Monomial& m) { return m.exps == t.exps; });
      if (it == out.end()) {
        out.push_back(std::move(t));
      } else {
        it->coeff += t.coeff;
        it->label.clear();
      }
    }
    std::erase_if(out, [](const Monomial& m) { return std::abs(m.coeff) < kCoefficientFloor; });
    std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) {
      const auto va = exponent_vector(a.exps);
      const auto vb = exponent_vector(b.exps);
      double da = 0, db = 0;
      for (double e : va)
        da += e;
      for (double e : vb)
        db += e;
      if (da != db)
        return da > db;
      return va > vb;
    });
    return out;
  }

  std::vector<std::string> species_;
  std::vector<std::vector<Monomial>> equations_;
};

/// Index-resolved form of a PolynomialOde for fast evaluation of f(s) and df/ds.
class CompiledPolynomial {
public:
  explicit CompiledPolynomial(const PolynomialOde& ode) : n_(ode.dimension()) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& m : ode.equations()[i]) {
        Term t{i, m.coeff, {}};
        for (const auto& [name, e] : m.exps)
          t.factors.emplace_back(ode.index_of(name), e);
        terms_.push_back(std::move(t));
      }
    }
  }

  std::size_t dimension() const { return n_; }

  void rhs(std::span<const double> s, std::span<double> ds) const {
    std::fill(ds.begin(), ds.end(), 0.0);
    for (const auto& t : terms_) {
      double v = t.coeff;
      for (const auto& [j, e] : t.factors)
        v *= detail::ipow(s[j], e);
      ds[t.row] += v;
    }
  }

  /// Row-major n x n Jacobian.
  void jacobian(std::span<const double> s, std::span<double> jac) const {
    std::fill(jac.begin(), jac.end(), 0.0);
    for (const auto& t : terms_) {
      for (std::size_t k = 0; k < t.factors.size(); ++k) {
        const auto [jk, ek] = t.factors[k];
        double v = t.coeff * ek * detail::ipow(s[jk], ek - 1);
        for (std::size_t q = 0; q < t.factors.size(); ++q)
          if (q != k)
            v *= detail::ipow(s[t.factors[q].first], t.factors[q].second);
        jac[t.row * n_ + jk] += v;
      }
    }
  }

private:
  struct Term {
    std::size_t row;
    double coeff;
    std::vector<std::pair<std::size_t, int>> factors;
  };
  std::size_t n_;
  std::vector<Term> terms_;
};

inline std::string format_monomial(const Monomial& m) {
  std::ostringstream out;
  out << m.coeff;
  for (const auto& [name, e] : m.exps) {
    out << "*" << name;
    if (e != 1)
      out << "^" << e;
  }
  return out.str();
}

inline std::vector<double> evaluate(const PolynomialOde& ode, std::span<const double> s) {
  if (s.size() != ode.dimension())
    throw InputError("state size does not match polynomial system");
  std::vector<double> out(ode.dimension());
  CompiledPolynomial(ode).rhs(s, out);
  return out;
}

/// Folds a constant species into the coefficients and drops its equation.
inline PolynomialOde substitute(const PolynomialOde& ode, const std::string& name, double value) {
  const std::size_t drop = ode.index_of(name);
  std::vector<std::string> species;
  std::vector<std::vector<Monomial>> equations;
  for (std::size_t i = 0; i < ode.dimension(); ++i) {
    if (i == drop)
      continue;
    species.push_back(ode.species()[i]);
    std::vector<Monomial> eq;
    for (auto m : ode.equations()[i]) {
      if (auto it = m.exps.find(name); it != m.exps.end()) {
        m.coeff *= detail::ipow(value, it->second);
        m.exps.erase(it);
        m.label.clear();
      }
      eq.push_back(std::move(m));
    }
    equations.push_back(std::move(eq));
  }
  return PolynomialOde(std::move(species), std::move(equations));
}

/// Symbolic mass-action ODE of a network: reaction j contributes
/// (b_ji - a_ji) k_j prod s^{a_j} to equation i.
inline PolynomialOde network_to_polynomials(const ReactionNetwork& net) {
  const auto xi = stoichiometric_matrix(net);
  std::vector<std::vector<Monomial>> equations(net.num_species());
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto& r = net.reactions()[j];
    for (std::size_t i = 0; i < net.num_species(); ++i) {
      if (xi(i, j) == 0)
        continue;
      std::string label;
      if (!r.rate_label.empty())
        label = std::abs(xi(i, j)) == 1 ? r.rate_label : std::to_string(std::abs(xi(i, j))) + "*" + r.rate_label;
      equations[i].push_back({xi(i, j) * r.rate, r.reactants, std::move(label)});
    }
  }
  return PolynomialOde(net.species_names(), std::move(equations));
}

/// Naive realization: one reaction per monomial. A term c * s^a in ds_i/dt
/// becomes a -> a + e_i (c > 0) or a -> a - e_i (c < 0) with rate |c|.
inline ReactionNetwork realize_network(const PolynomialOde& ode) {
  std::vector<Reaction> reactions;
  for (std::size_t i = 0; i < ode.dimension(); ++i) {
    const std::string& target = ode.species()[i];
    for (const auto& m : ode.equations()[i]) {
      Reaction r;
      r.reactants = m.exps;
      r.products = m.exps;
      r.rate = std::abs(m.coeff);
      r.rate_label = m.label;
      if (m.coeff > 0) {
        r.products[target] += 1;
      } else {
        auto it = r.products.find(target);
        if (it == r.products.end()) {
          std::ostringstream msg;
          msg << "kinetic condition violated: negative term " << format_monomial(m) << " in d" << target << "/dt has no factor " << target;
          throw KineticConditionError(msg.str());
        }
        if (--it->second == 0)
          r.products.erase(it);
      }
      reactions.push_back(std::move(r));
    }
  }
  if (reactions.empty())
    throw InputError("polynomial system is identically zero; nothing to realize");
  return ReactionNetwork(ode.species(), std::move(reactions));
}

inline std::string format_polynomials(const PolynomialOde& ode) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ode.dimension(); ++i) {
    out << "d" << ode.species()[i] << "/dt =";
    if (ode.equations()[i].empty())
      out << " 0";
    bool first = true;
    for (const auto& m : ode.equations()[i]) {
      const std::string term = format_monomial(m);
      if (first)
        out << " " << term;
      else if (term.front() == '-')
        out << " - " << term.substr(1);
      else
        out << " + " << term;
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

} // namespace clockwork::crn

#endif
