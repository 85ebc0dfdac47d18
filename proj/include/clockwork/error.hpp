#ifndef CLOCKWORK_ERROR_HPP
#define CLOCKWORK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace clockwork {

/// Malformed input: bad network, unknown species, invalid parameters.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A polynomial ODE that cannot be realized monomial-by-monomial.
class KineticConditionError : public InputError {
public:
  explicit KineticConditionError(const std::string& what) : InputError(what) {}
};

/// Step-size underflow, non-finite state, or excessive negative undershoot.
class IntegrationError : public std::runtime_error {
public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// A trace that does not oscillate enough for the requested analysis.
class AnalysisError : public std::runtime_error {
public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace clockwork

#endif
