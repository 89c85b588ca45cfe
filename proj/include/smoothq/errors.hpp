#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smoothq {

/// Bad shapes, unknown names, out-of-range parameters, unreadable configs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A logarithm or ratio was requested on the boundary of the simplex.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure inside a solver or integrator. `time()` is the
/// simulation time (or iteration count) at which it happened.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Fixed-point or Newton iteration hit its cap. Carries the last iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double iterations,
                   std::vector<std::vector<double>> last_iterate, double residual)
      : NumericalError(what, iterations),
        last_iterate_(std::move(last_iterate)),
        residual_(residual) {}
  const std::vector<std::vector<double>>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<std::vector<double>> last_iterate_;
  double residual_;
};

}  // namespace smoothq
