#pragma once

#include <stdexcept>
#include <string>

namespace pulsesync {

// Bad input: a value violates a type invariant or an operation precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The model itself cannot produce a meaningful answer (oversubscribed
// channel, saturated availability, malformed trace).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pulsesync
