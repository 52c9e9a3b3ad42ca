#pragma once

#include <stdexcept>
#include <string>

namespace crowdbench {

/// Non-finite numbers or violated preconditions on a public operation.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is undefined for the given input (e.g. minimum over an empty set).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Unknown policy names, bad config files, unresolvable references.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling could not place the agents of a scenario.
class GenerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A metric was asked of a log it is not defined on.
class MisuseError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// The robot policy failed to produce an action; the episode is aborted.
class PolicyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-order message on the policy bridge.
class ProtocolError : public PolicyError {
public:
  using PolicyError::PolicyError;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace crowdbench
