#pragma once

#include <stdexcept>
#include <string>

namespace ppmc {

/// Argument outside the mathematical domain of an operation (log of a
/// non-positive value, sigma <= 0, division by zero, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A model evaluation assigned probability zero to an observed outcome.
/// Recoverable: samplers treat it as a rejected proposal.
class EvaluationImpossible : public std::runtime_error {
 public:
  explicit EvaluationImpossible(const std::string& what)
      : std::runtime_error(what) {}
};

/// NaN or +inf showed up where a finite log-probability was expected.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Values from two different tapes were combined, or a value that is not
/// recorded on a tape was used where a recorded one is required.
class TapeMismatch : public std::runtime_error {
 public:
  explicit TapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator or sampler was paired with a model of the wrong semantics.
class ModeMismatch : public std::runtime_error {
 public:
  explicit ModeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// A leapfrog trajectory produced a non-finite state. The caller rejects
/// the proposal; this never escapes a sampler step.
class DivergentTrajectory : public std::runtime_error {
 public:
  explicit DivergentTrajectory(const std::string& what)
      : std::runtime_error(what) {}
};

/// A chain had to be abandoned (e.g. most steps divergent).
class SamplingError : public std::runtime_error {
 public:
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ppmc
