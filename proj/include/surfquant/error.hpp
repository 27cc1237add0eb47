#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace surfquant {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation left the domain of an elementary function (log of a
/// nonpositive value, sqrt of a negative value, division by zero).
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string subexpression)
      : Error(message + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// |grad f| fell below the regularity threshold at a point.
class DegenerateGradient : public Error {
 public:
  DegenerateGradient(const std::string& message, double grad_norm)
      : Error(message), grad_norm_(grad_norm) {}

  double grad_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

/// An iterative procedure (Newton projection, curve tracing) did not finish.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& message, std::vector<double> trace = {})
      : Error(message), trace_(std::move(trace)) {}

  /// Residual history, one entry per iteration.
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace surfquant
