#pragma once

#include <stdexcept>
#include <string>

namespace dualgp {

// Thrown when a factorization or positive-definiteness check fails even after
// jitter escalation. The message names every jitter level that was attempted.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for malformed experiment configs: unknown keys, unknown enum tags,
// out-of-range values, missing required blocks.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualgp
