#pragma once

#include <stdexcept>
#include <string>

namespace rydreg {

// Invalid quantum numbers or arguments outside a formula's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent or unusable configuration. The CLI maps this to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse, e.g. mixing objects built on different bases.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unaccounted register states in an aggregate.
class AccountingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydreg
