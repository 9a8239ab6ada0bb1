#pragma once

#include <stdexcept>
#include <string>

namespace digitstat {

/// Raised when an argument lies outside the domain of an operation
/// (radix below 2, a rational outside [0,1), a malformed digit, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when parameters are well-formed but no digit sequence can realize
/// them (e.g. a mean of 0 or 2 without digit frequencies).
class InfeasibleError : public std::domain_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace digitstat
