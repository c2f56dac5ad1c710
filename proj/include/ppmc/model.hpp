#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppmc/errors.hpp"
#include "ppmc/rng.hpp"
#include "ppmc/tape.hpp"

namespace ppmc {

/// Trace assignment: the flat, unconstrained parameter vector.
using ParamVector = std::vector<double>;

/// How a model's internal randomness is to be treated during inference.
enum class SemanticsMode { Deterministic, Marginalization, Nondeterminism };

inline const char* to_string(SemanticsMode m) {
  switch (m) {
    case SemanticsMode::Deterministic: return "deterministic";
    case SemanticsMode::Marginalization: return "marginalization";
    case SemanticsMode::Nondeterminism: return "nondeterminism";
  }
  return "?";
}

/// A probabilistic program: maps a parameter vector to the unnormalized
/// log-probability of that trace, optionally consuming a randomness stream
/// for internal (nuisance / nondeterministic) draws.
///
/// observe() must be pure given (x, rng state): no internal mutability, so
/// a model may be shared read-only across chains. A deterministic model
/// never touches rng (it is passed nullptr).
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dimension() const = 0;
  virtual SemanticsMode semantics() const = 0;

  /// Accumulates log p~(x | y[, z]) on the caller's tape. `x` holds one
  /// recorded input per dimension.
  virtual Var observe(Tape& tape, std::span<const Var> x,
                      RngStream* rng) const = 0;

  bool is_stochastic() const {
    return semantics() != SemanticsMode::Deterministic;
  }
};

/// A stochastic model whose nuisance randomness has finitely many
/// outcomes, each with a known prior weight. Used by exact-enumeration
/// oracles and estimator cross-checks.
class EnumerableModel : public Model {
 public:
  virtual std::uint64_t outcome_count() const = 0;
  virtual double outcome_weight(std::uint64_t k) const = 0;

  /// observe() with the internal randomness pinned to outcome k.
  virtual Var observe_outcome(Tape& tape, std::span<const Var> x,
                              std::uint64_t k) const = 0;
};

struct EvalResult {
  double logp;
  std::vector<double> grad;
};

namespace detail {

inline std::vector<Var> record_inputs(Tape& tape, const ParamVector& x) {
  std::vector<Var> vars;
  vars.reserve(x.size());
  for (double v : x) vars.push_back(tape.input(v));
  return vars;
}

inline void check_params(const Model& model, const ParamVector& x) {
  if (x.size() != model.dimension())
    throw DomainError("evaluate: parameter vector has length " +
                      std::to_string(x.size()) + ", model dimension is " +
                      std::to_string(model.dimension()));
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("evaluate: non-finite parameter");
}

inline EvalResult extract(Tape& tape, const Var& logp, std::span<const Var> inputs) {
  const double value = logp.value();
  if (std::isnan(value) || value == INFINITY)
    throw NumericalError("evaluate: log-probability is not finite");
  if (value == -INFINITY)
    throw EvaluationImpossible("evaluate: log-probability is -inf");
  return EvalResult{value, tape.gradient(logp, inputs)};
}

}  // namespace detail

/// Runs observe on a fresh tape and returns log p~ together with its
/// gradient with respect to x. For a stochastic model the result is a
/// deterministic function of (x, rng state).
inline EvalResult evaluate(const Model& model, const ParamVector& x,
                           RngStream* rng = nullptr) {
  detail::check_params(model, x);
  if (model.is_stochastic() && rng == nullptr)
    throw DomainError("evaluate: stochastic model requires an rng stream");
  Tape tape;
  const std::vector<Var> inputs = detail::record_inputs(tape, x);
  const Var logp = model.observe(tape, inputs, model.is_stochastic() ? rng : nullptr);
  return detail::extract(tape, logp, inputs);
}

/// As evaluate(), but with the nuisance outcome of an enumerable model
/// pinned to index k.
inline EvalResult evaluate_outcome(const EnumerableModel& model,
                                   const ParamVector& x, std::uint64_t k) {
  detail::check_params(model, x);
  Tape tape;
  const std::vector<Var> inputs = detail::record_inputs(tape, x);
  const Var logp = model.observe_outcome(tape, inputs, k);
  return detail::extract(tape, logp, inputs);
}

/// `count` independent evaluations, each consuming fresh draws from rng.
inline std::vector<EvalResult> evaluate_batch(const Model& model,
                                              const ParamVector& x,
                                              RngStream& rng, int count) {
  if (count < 1) throw DomainError("evaluate_batch: count < 1");
  if (!model.is_stochastic())
    throw ModeMismatch("evaluate_batch: model is deterministic");
  std::vector<EvalResult> results;
  results.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    try {
      results.push_back(evaluate(model, x, &rng));
    } catch (const EvaluationImpossible& e) {
      throw EvaluationImpossible("draw " + std::to_string(i) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("draw " + std::to_string(i) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace ppmc
