#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pact {

/// Raised when an input violates a domain invariant. `path` names the
/// offending field (e.g. "types.pmf") when the value came from a scenario.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::string message, std::string path = {})
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        message_(std::move(message)),
        path_(std::move(path)) {}

  const std::string& message() const noexcept { return message_; }
  const std::string& path() const noexcept { return path_; }

  /// Same error with `prefix` prepended to the field path.
  ValidationError nested(const std::string& prefix) const {
    return ValidationError(message_, path_.empty() ? prefix : prefix + "." + path_);
  }

 private:
  std::string message_;
  std::string path_;
};

/// Cost-curve fitting failed (too few points, or costs not nondecreasing in q).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A menu failed its IR/IC check where a feasible one was required.
class InfeasibleMenuError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pact
