#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ppmc/model.hpp"
#include "ppmc/oracles.hpp"

namespace ppmc {

/// Stochastic estimate of the trace-probability gradient, plus a
/// log-density estimate and diagnostics. `ess` is the effective sample
/// size of the importance weights and is present in marginalization mode
/// only.
struct GradientEstimate {
  std::vector<double> grad;
  double logp = 0.0;
  int n_draws = 1;
  std::optional<double> ess;

  /// Degenerate importance weights signal a poor marginal-gradient
  /// estimate.
  bool low_ess() const { return ess && *ess < 0.1 * n_draws; }
};

struct EstimatorConfig {
  int n_draws = 1;
  SemanticsMode mode = SemanticsMode::Marginalization;
};

namespace detail {

inline void check_estimator_args(const Model& model, const EstimatorConfig& cfg,
                                 SemanticsMode required) {
  if (cfg.n_draws < 1) throw DomainError("estimator: n_draws < 1");
  if (cfg.mode != required)
    throw ModeMismatch(std::string("estimator: config mode is ") +
                       to_string(cfg.mode) + ", estimator requires " +
                       to_string(required));
  if (model.semantics() != required)
    throw ModeMismatch(std::string("estimator: model semantics is ") +
                       to_string(model.semantics()) + ", estimator requires " +
                       to_string(required));
}

}  // namespace detail

/// Deterministic models: one evaluation, exact gradient and log-density.
inline GradientEstimate exact_gradient(const Model& model,
                                       const ParamVector& x) {
  if (model.is_stochastic())
    throw ModeMismatch("exact_gradient: model is stochastic");
  EvalResult r = evaluate(model, x);
  return GradientEstimate{std::move(r.grad), r.logp, 1, std::nullopt};
}

/// Nondeterminism: unweighted mean of N fresh prior-draw evaluations.
/// The logp field is the matching average of log-densities (the geometric
/// integral estimate).
inline GradientEstimate nondeterminism_gradient(const Model& model,
                                                const ParamVector& x,
                                                const EstimatorConfig& cfg,
                                                RngStream& rng) {
  detail::check_estimator_args(model, cfg, SemanticsMode::Nondeterminism);
  const std::vector<EvalResult> draws =
      evaluate_batch(model, x, rng, cfg.n_draws);
  GradientEstimate est;
  est.grad.assign(model.dimension(), 0.0);
  est.n_draws = cfg.n_draws;
  const double inv_n = 1.0 / cfg.n_draws;
  for (const EvalResult& d : draws) {
    est.logp += inv_n * d.logp;
    for (std::size_t i = 0; i < est.grad.size(); ++i)
      est.grad[i] += inv_n * d.grad[i];
  }
  return est;
}

/// Marginalization: self-normalized importance sampling with the program's
/// internal prior as proposal. Draws that make the trace assignment more
/// likely contribute more to the gradient; impossible draws get weight 0.
/// The logp field is logsumexp(logp_i) - log N, a (diagnostics-only,
/// biased-low) marginal log-likelihood estimate.
inline GradientEstimate marginalization_gradient(const Model& model,
                                                 const ParamVector& x,
                                                 const EstimatorConfig& cfg,
                                                 RngStream& rng) {
  detail::check_estimator_args(model, cfg, SemanticsMode::Marginalization);
  std::vector<EvalResult> draws;
  draws.reserve(cfg.n_draws);
  for (int i = 0; i < cfg.n_draws; ++i) {
    try {
      draws.push_back(evaluate(model, x, &rng));
    } catch (const EvaluationImpossible&) {
      // zero weight; skip
    }
  }
  if (draws.empty())
    throw EvaluationImpossible(
        "marginalization_gradient: all draws impossible");

  double max_logp = -INFINITY;
  for (const EvalResult& d : draws) max_logp = std::max(max_logp, d.logp);
  double sum_w = 0.0;
  std::vector<double> w(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    w[i] = std::exp(draws[i].logp - max_logp);
    sum_w += w[i];
  }

  GradientEstimate est;
  est.grad.assign(model.dimension(), 0.0);
  est.n_draws = cfg.n_draws;
  est.logp = max_logp + std::log(sum_w) - std::log(cfg.n_draws);
  double sum_w2 = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double wi = w[i] / sum_w;
    sum_w2 += wi * wi;
    for (std::size_t k = 0; k < est.grad.size(); ++k)
      est.grad[k] += wi * draws[i].grad[k];
  }
  est.ess = 1.0 / sum_w2;
  return est;
}

/// Exact counterpart of the two estimators above for enumerable models:
/// the finite-sum version of the marginalization and nondeterminism
/// integrals. Oracle for estimator tests.
inline GradientEstimate enumerated_gradient(const EnumerableModel& model,
                                            const ParamVector& x,
                                            SemanticsMode mode) {
  const std::vector<EnumeratedOutcome> outcomes = enumerate_outcomes(model, x);
  GradientEstimate est;
  est.grad.assign(model.dimension(), 0.0);
  est.n_draws = static_cast<int>(outcomes.size());

  if (mode == SemanticsMode::Nondeterminism) {
    est.logp = 0.0;
    for (const EnumeratedOutcome& o : outcomes) {
      est.logp += o.weight * o.logp;
      for (std::size_t k = 0; k < est.grad.size(); ++k)
        est.grad[k] += o.weight * o.grad[k];
    }
    return est;
  }
  if (mode != SemanticsMode::Marginalization)
    throw ModeMismatch("enumerated_gradient: mode must be marginalization or "
                       "nondeterminism");

  // softmax over log(prior weight) + logp: the exact posterior weights of
  // the nuisance assignments
  double max_lw = -INFINITY;
  std::vector<double> lw(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    lw[i] = std::log(outcomes[i].weight) + outcomes[i].logp;
    max_lw = std::max(max_lw, lw[i]);
  }
  double sum_w = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    lw[i] = std::exp(lw[i] - max_lw);
    sum_w += lw[i];
  }
  est.logp = max_lw + std::log(sum_w);  // exact log of the marginal sum
  double sum_w2 = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const double wi = lw[i] / sum_w;
    sum_w2 += wi * wi;
    for (std::size_t k = 0; k < est.grad.size(); ++k)
      est.grad[k] += wi * outcomes[i].grad[k];
  }
  est.ess = 1.0 / sum_w2;
  return est;
}

}  // namespace ppmc
