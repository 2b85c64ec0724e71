#pragma once

#include <stdexcept>
#include <string>

namespace wentzell {

/// An integral that the caller asked for does not converge.
class DivergentIntegral : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// lambda*M + K is not positive definite for the requested shift.
class NotCoercive : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Coefficient violates the power-comparison monotonicity requirement.
class HypothesisViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A test function does not belong to the space a Green identity needs.
class MembershipError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration problem tied to one JSON key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

} // namespace wentzell
