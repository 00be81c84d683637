#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixhess {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Eigenvalues left the cone Gamma_{k-1}. Carries the offending sigma values
/// (sigma_1..sigma_{k-1}) for pointwise failures, or node indices for grid
/// failures.
class AdmissibilityError : public DomainError {
 public:
  AdmissibilityError(const std::string& what, std::vector<double> sigmas,
                     std::vector<std::size_t> nodes = {})
      : DomainError(what), sigmas_(std::move(sigmas)), nodes_(std::move(nodes)) {}

  const std::vector<double>& sigmas() const noexcept { return sigmas_; }
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<double> sigmas_;
  std::vector<std::size_t> nodes_;
};

/// A problem description violates its invariants (subsolution, k <= n, ...).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public SpecError {
 public:
  using SpecError::SpecError;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backtracking line search ran out of halvings.
class StepFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Krylov solve finished above the stagnation threshold.
class LinearSolveFailure : public SolverError {
 public:
  LinearSolveFailure(const std::string& what, double relative_residual)
      : SolverError(what), relative_residual_(relative_residual) {}
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  double relative_residual_;
};

/// Newton hit its iteration cap without reaching the tolerance.
class NewtonFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

class ContinuationFailure : public SolverError {
 public:
  ContinuationFailure(const std::string& what, double last_good_t)
      : SolverError(what), last_good_t_(last_good_t) {}
  double last_good_t() const noexcept { return last_good_t_; }

 private:
  double last_good_t_;
};

/// A user-supplied chi callback threw; the message carries sample coordinates.
class ChiCallbackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixhess
