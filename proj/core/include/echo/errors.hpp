#pragma once

#include <stdexcept>
#include <string>

namespace echo {

/// Argument outside the mathematical domain of a function (e.g. h(x; λ) with λ ≤ 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed game configuration or infeasible attention profile.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver failed to converge; what() carries the diagnostics.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural assumption required by an analysis does not hold at the
/// supplied equilibrium (e.g. a core player with marginal influence outside (0,1)).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace echo
